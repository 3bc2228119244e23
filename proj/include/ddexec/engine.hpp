#pragma once

// Monte Carlo evaluation of the eta-normalised objective
//
//     integral xdot^2 dt + L lambda_check integral x (S - K) dt      (VaR / ES)
//     integral xdot^2 dt + L lambda sigma^2 integral x^2 g(t) dt      (SAE)
//
// and model/criterion comparisons on a common Brownian path.

#include "ddexec/error.hpp"
#include "ddexec/models.hpp"
#include "ddexec/quadrature.hpp"
#include "ddexec/risk.hpp"
#include "ddexec/sae_solver.hpp"
#include "ddexec/scenario.hpp"
#include "ddexec/strategy.hpp"
#include "ddexec/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace ddexec {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed_base = 0;
};

enum class StrategyKind { ClosedFormVaR, ClosedFormES, VWAP, SaeDeterministic };

struct McOptions {
    bool antithetic = false;   // pair each seed's draws with their negation
    std::size_t threads = 0;   // 0: DDEXEC_THREADS or hardware concurrency
};

/// Worker count from DDEXEC_THREADS, else the hardware concurrency.
inline std::size_t default_thread_count() {
    if (const char* env = std::getenv("DDEXEC_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; the first exception is rethrown on the caller.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += threads) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Sample mean and standard error, computed on data shifted by the first
/// sample (identical samples give exactly zero spread).
inline McEstimate summarize(std::span<const double> samples, std::uint64_t seed_base = 0) {
    detail::require(samples.size() >= 2, "summarize: need at least two samples");
    const double shift = samples.front();
    std::vector<double> d(samples.size()), d2(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        d[i] = samples[i] - shift;
        d2[i] = d[i] * d[i];
    }
    const double n = static_cast<double>(samples.size());
    const double sum = pairwise_sum(d);
    const double var = std::max(0.0, (pairwise_sum(d2) - sum * sum / n) / (n - 1.0));
    return {shift + sum / n, std::sqrt(var / n), samples.size(), seed_base};
}

struct McBreakdown {
    McEstimate objective;
    McEstimate impact;  // integral xdot^2
    McEstimate risk;
};

namespace detail {

struct PathObjective {
    double impact = 0.0;
    double risk = 0.0;
};

inline double integral_rate_squared(const Trajectory& traj) {
    return trapezoid(traj.grid.n_steps, traj.grid.dt(), [&](std::size_t i) { return traj.rate[i] * traj.rate[i]; });
}

inline PathObjective evaluate_objective(const Trajectory& traj, const PriceModel& model, const PricePath* path,
                                        RiskCriterion criterion, double lambda_check, const RiskSpec& risk) {
    PathObjective out;
    out.impact = integral_rate_squared(traj);
    if (criterion == RiskCriterion::SAE)
        out.risk = eval_sae_risk(traj, model, risk.lambda_sae, risk.leverage_L).value;
    else
        out.risk = eval_var_risk(traj, *path, risk.leverage_L * lambda_check, model.shift()).value;
    return out;
}

}  // namespace detail

/// Monte Carlo estimate of the objective of `kind` under `model`.
///
/// Path i uses seed seed_base + i (pair i with antithetic variates). The
/// result is independent of the worker count.
inline McBreakdown mc_objective_breakdown(StrategyKind kind, const PriceModel& model, const ExecutionOrder& order,
                                          const RiskSpec& risk, std::size_t n_paths, std::size_t n_steps,
                                          std::uint64_t seed_base, const McOptions& opts = {}) {
    order.validate();
    model.validate();
    risk.validate();
    detail::require(n_paths >= 2, "mc_objective: n_paths must be >= 2");
    const bool closed_form = kind == StrategyKind::ClosedFormVaR || kind == StrategyKind::ClosedFormES;
    detail::require(!(closed_form && model.kind == ModelKind::ABM),
                    "mc_objective: closed-form VaR/ES strategies require DD or GBM dynamics");
    if (opts.antithetic) detail::require(n_paths % 2 == 0, "mc_objective: antithetic sampling needs even n_paths");

    const TimeGrid grid(order.t_end, n_steps);
    const RiskCriterion criterion = kind == StrategyKind::ClosedFormVaR ? RiskCriterion::VaR
                                    : kind == StrategyKind::ClosedFormES ? RiskCriterion::ES
                                    : kind == StrategyKind::SaeDeterministic ? RiskCriterion::SAE
                                                                             : risk.criterion;
    const double lambda_check = criterion == RiskCriterion::SAE ? 0.0 : risk.lambda_check(criterion, model.sigma);

    // Path-independent schedules are built once.
    std::optional<Trajectory> fixed;
    if (kind == StrategyKind::VWAP) fixed = vwap(order, grid);
    if (kind == StrategyKind::SaeDeterministic)
        fixed = solve_bvp_series(order, model, sae_k(model, risk.leverage_L, risk.lambda_sae), grid);

    auto one_path = [&](std::span<const double> z, std::uint64_t seed) {
        const PricePath path = simulate_path_from_normals(model, grid, z, seed);
        if (fixed) return detail::evaluate_objective(*fixed, model, &path, criterion, lambda_check, risk);
        const Trajectory traj = closed_form_optimal(order, model, path, lambda_check, risk.leverage_L);
        return detail::evaluate_objective(traj, model, &path, criterion, lambda_check, risk);
    };

    const std::size_t n_samples = opts.antithetic ? n_paths / 2 : n_paths;
    std::vector<double> impact(n_samples), risk_term(n_samples), total(n_samples);
    parallel_for(n_samples, opts.threads ? opts.threads : default_thread_count(), [&](std::size_t i) {
        const std::uint64_t seed = seed_base + i;
        auto z = standard_normals(seed, n_steps);
        auto r = one_path(z, seed);
        if (opts.antithetic) {
            for (auto& v : z) v = -v;
            const auto r2 = one_path(z, seed);
            r.impact = 0.5 * (r.impact + r2.impact);
            r.risk = 0.5 * (r.risk + r2.risk);
        }
        impact[i] = r.impact;
        risk_term[i] = r.risk;
        total[i] = r.impact + r.risk;
    });

    McBreakdown out{summarize(total, seed_base), summarize(impact, seed_base), summarize(risk_term, seed_base)};
    out.objective.n_paths = out.impact.n_paths = out.risk.n_paths = n_paths;
    return out;
}

inline McEstimate mc_objective(StrategyKind kind, const PriceModel& model, const ExecutionOrder& order,
                               const RiskSpec& risk, std::size_t n_paths, std::size_t n_steps, std::uint64_t seed_base,
                               const McOptions& opts = {}) {
    return mc_objective_breakdown(kind, model, order, risk, n_paths, n_steps, seed_base, opts).objective;
}

// ---------------------------------------------------------------------------
// Model comparison
// ---------------------------------------------------------------------------

/// Models and risk weights shared by all combinations of a scenario.
///
/// The VaR constant is computed from the scenario's base volatility and
/// shared by GBM+VaR and DD+VaR, also when the DD volatility is rescaled.
/// The SAE weight is mapped from lambda_check on the DD model and reused
/// for ABM. Every kind uses the same annualized sigma unless rescaled.
struct ComparisonSetup {
    ExecutionOrder order;
    TimeGrid grid;
    PriceModel abm, gbm, dd;
    RiskSpec risk;  // criterion VaR; lambda_sae holds the mapped SAE weight
    double lambda_tilde = 0.0;
    double lambda_check = 0.0;

    const PriceModel& model_for(Combination c) const {
        switch (c) {
            case Combination::AbmSae: return abm;
            case Combination::GbmVar: return gbm;
            case Combination::DdSae:
            case Combination::DdVar: return dd;
        }
        return dd;
    }

    static StrategyKind strategy_for(Combination c) {
        return (c == Combination::AbmSae || c == Combination::DdSae) ? StrategyKind::SaeDeterministic
                                                                      : StrategyKind::ClosedFormVaR;
    }
};

inline ComparisonSetup make_comparison_setup(const ScenarioConfig& cfg) {
    validate(cfg);
    ComparisonSetup s;
    s.order = {cfg.x_total, cfg.t_end};
    s.grid = TimeGrid(cfg.t_end, cfg.n_steps);
    s.abm = PriceModel::abm(cfg.s0, cfg.sigma);
    s.gbm = PriceModel::gbm(cfg.s0, cfg.sigma);
    const double dd_sigma = cfg.rescale_vol ? rescale_dd_vol(cfg.sigma, cfg.s0, cfg.shift_k) : cfg.sigma;
    s.dd = PriceModel::dd(cfg.s0, dd_sigma, cfg.shift_k);

    s.risk.criterion = RiskCriterion::VaR;
    s.risk.alpha = cfg.alpha;
    s.risk.horizon_h = cfg.horizon_h;
    s.risk.leverage_L = cfg.leverage_L;
    s.risk.eta = cfg.eta;
    s.risk.lambda_sigma = cfg.sigma;

    s.lambda_tilde = s.risk.lambda_bar(RiskCriterion::VaR, cfg.sigma);
    s.lambda_check = s.risk.lambda_check(RiskCriterion::VaR, cfg.sigma);
    if (s.dd.sigma > 0.0) {
        s.risk.lambda_sae = cfg.lambda_mapping == LambdaMapping::VwapMatch
                                ? map_lambda_vwap(s.lambda_check, s.dd, cfg.x_total, cfg.t_end)
                                : map_lambda_constant(s.lambda_check, s.dd, cfg.x_total);
    }
    return s;
}

struct CombinationRun {
    Combination combination = Combination::DdVar;
    PriceModel model;
    Trajectory trajectory;
    double min_holdings = 0.0;
    bool goes_negative = false;
    double max_vwap_deviation = 0.0;  // max_t |x(t) - x_vwap(t)| / X
};

struct ComparisonRun {
    std::string scenario_id;
    std::uint64_t seed = 0;
    ComparisonSetup setup;
    PricePath abm_path, gbm_path, dd_path;  // one Brownian path, three dynamics
    Trajectory vwap_trajectory;
    std::vector<CombinationRun> runs;

    const PricePath& path_for(Combination c) const {
        switch (c) {
            case Combination::AbmSae: return abm_path;
            case Combination::GbmVar: return gbm_path;
            case Combination::DdSae:
            case Combination::DdVar: return dd_path;
        }
        return dd_path;
    }

    const CombinationRun* find(Combination c) const {
        for (const auto& r : runs)
            if (r.combination == c) return &r;
        return nullptr;
    }
};

/// Builds a combination's schedule on the given path. SAE schedules are
/// deterministic and ignore the path.
inline Trajectory combination_trajectory(const ComparisonSetup& setup, Combination c, const PricePath& path) {
    const PriceModel& model = setup.model_for(c);
    if (ComparisonSetup::strategy_for(c) == StrategyKind::SaeDeterministic)
        return solve_bvp_series(setup.order, model, sae_k(model, setup.risk.leverage_L, setup.risk.lambda_sae),
                                setup.grid);
    return closed_form_optimal(setup.order, model, path, setup.lambda_check, setup.risk.leverage_L);
}

inline ComparisonRun run_comparison(const ScenarioConfig& cfg) {
    ComparisonRun run;
    run.scenario_id = cfg.name;
    run.seed = cfg.seed;
    try {
        run.setup = make_comparison_setup(cfg);
    } catch (const std::invalid_argument& e) {
        throw NumericalError(std::string("calibration failed: ") + e.what());
    }
    const auto& s = run.setup;

    const auto z = standard_normals(cfg.seed, cfg.n_steps);
    run.abm_path = simulate_path_from_normals(s.abm, s.grid, z, cfg.seed);
    run.gbm_path = simulate_path_from_normals(s.gbm, s.grid, z, cfg.seed);
    run.dd_path = simulate_path_from_normals(s.dd, s.grid, z, cfg.seed);
    run.vwap_trajectory = vwap(s.order, s.grid);

    for (auto c : cfg.combinations) {
        CombinationRun r;
        r.combination = c;
        r.model = s.model_for(c);
        r.trajectory = combination_trajectory(s, c, run.path_for(c));
        r.min_holdings = r.trajectory.min_holdings();
        r.goes_negative = r.trajectory.goes_negative();
        for (std::size_t i = 0; i < s.grid.size(); ++i)
            r.max_vwap_deviation = std::max(r.max_vwap_deviation,
                                            std::abs(r.trajectory.holdings[i] - run.vwap_trajectory.holdings[i]));
        r.max_vwap_deviation /= s.order.x_total;
        run.runs.push_back(std::move(r));
    }
    return run;
}

}  // namespace ddexec
