// Acceptance checks. One line per criterion; exit status is non-zero if any fails.

#include "ddexec/ddexec.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace ddexec;
namespace fs = std::filesystem;

namespace {

constexpr double kT = 1.0 / 252.0;
constexpr double kX = 1e6;

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

RiskSpec fig1_risk() {
    RiskSpec r;
    r.alpha = 0.95;
    r.horizon_h = kT;
    r.leverage_L = 100;
    r.eta = 2e-6;
    return r;
}

double fig1_lambda_sae() {
    const auto cfg = preset_fig1();
    return make_comparison_setup(cfg).risk.lambda_sae;
}

// 1. Monte Carlo objective of the closed-form strategy vs the value function.
Check value_function_validation() {
    Check c;
    const auto m = PriceModel::dd(100, 0.3, 5);
    const auto r = fig1_risk();
    const auto t0 = std::chrono::steady_clock::now();
    const auto est = mc_objective(StrategyKind::ClosedFormVaR, m, {kX, kT}, r, 10000, 252, 1);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double vf = value_function_closed_form({kX, kT}, m, r.lambda_check(RiskCriterion::VaR, 0.3), r.leverage_L);
    const double z = (est.mean - vf) / est.std_error;
    c.expect(std::abs(z) < 3.0, "|MC - V| = " + fmt("%.2f", std::abs(z)) + " SE");
    c.expect(secs < 60.0, "runtime " + fmt("%.1f", secs) + " s");
    c.note("z = " + fmt("%.3f", z) + ", " + fmt("%.1f", secs) + " s");
    return c;
}

// 2. Series vs finite differences, sigma -> 0 limit, FD order.
Check solver_cross_validation() {
    Check c;
    const ExecutionOrder order{kX, kT};
    const auto m = PriceModel::dd(100, 0.3, 5);
    const double k = sae_k(m, 100, fig1_lambda_sae());
    const TimeGrid grid(kT, 252);
    const auto series = solve_bvp_series(order, m, k, grid);
    const auto fd = solve_bvp_fd(order, m, k, 252);
    const double d = sup_diff(series.holdings, fd.holdings);
    c.expect(d <= 1e-6 * kX, "series vs FD sup " + fmt("%.3g", d / kX) + " X");

    // sigma -> 0 with k S0 T = 1.3 held fixed.
    const ExecutionOrder unit{kX, 1.0};
    const auto flat = PriceModel::dd(2.0, 1e-10, 0.5);
    const double k0 = 0.65;
    const TimeGrid g100(1.0, 100);
    const auto s0 = solve_bvp_series(unit, flat, k0, g100);
    double err_series = 0.0;
    for (std::size_t i = 0; i < g100.size(); ++i)
        err_series = std::max(err_series, std::abs(s0.holdings[i] - oracle::sinh_solution(kX, k0 * 2.0, 1.0, g100.time(i))));
    const auto f0 = solve_bvp_fd(unit, flat, k0, 8000);
    double err_fd = 0.0;
    for (std::size_t i = 0; i <= 8000; ++i)
        err_fd = std::max(err_fd, std::abs(f0.holdings[i] - oracle::sinh_solution(kX, k0 * 2.0, 1.0, f0.grid.time(i))));
    c.expect(err_series <= 1e-8 * kX, "series vs sinh " + fmt("%.3g", err_series / kX) + " X");
    c.expect(err_fd <= 1e-8 * kX, "FD vs sinh " + fmt("%.3g", err_fd / kX) + " X");

    // Order of convergence on a problem with visible curvature.
    const ExecutionOrder o{1.0, 1.0};
    const auto stiff = PriceModel::dd(1.0, 0.8, 0.3);
    const auto exact = solve_bvp_series(o, stiff, 4.0, TimeGrid(1.0, 64));
    std::vector<double> errs;
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
        const auto f = solve_bvp_fd(o, stiff, 4.0, n);
        double e = 0.0;
        for (std::size_t i = 0; i <= n; ++i) e = std::max(e, std::abs(f.holdings[i] - exact.holdings[i * (64 / n)]));
        errs.push_back(e);
    }
    std::string ratios;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        const double ratio = errs[i] / errs[i + 1];
        c.expect(ratio >= 3.5 && ratio <= 4.5, "FD ratio " + fmt("%.3f", ratio));
        ratios += (i ? "/" : "") + fmt("%.3f", ratio);
    }
    c.note("series-FD " + fmt("%.2g", d / kX) + " X, sinh " + fmt("%.2g", std::max(err_series, err_fd) / kX) +
           " X, FD ratios " + ratios);
    return c;
}

// 3. Mapped SAE weight reproduces the VaR risk integral under VWAP.
Check lambda_mapping() {
    Check c;
    double worst = 0.0;
    for (double shift : {5.0, 50.0, 0.0}) {
        for (double sigma : {0.3, 0.6}) {
            const auto m = PriceModel::dd(100, sigma, shift);
            const double lc = var_lambda(0.95, sigma, kT) / 2e-6;
            const double lsae = map_lambda_vwap(lc, m, kX, kT);
            const int n = 10000;
            auto x = [&](double t) { return kX * (kT - t) / kT; };
            const double var_side = lc * oracle::simpson([&](double t) { return x(t) * m.y0(); }, 0.0, kT, n);
            const double sae_side =
                lsae * sigma * sigma * oracle::simpson([&](double t) { return x(t) * x(t) * sae_g(m, t); }, 0.0, kT, n);
            const double rel = std::abs(sae_side - var_side) / var_side;
            worst = std::max(worst, rel);
            c.expect(rel <= 1e-3, "K=" + fmt("%g", shift) + " sigma=" + fmt("%g", sigma) + " rel " + fmt("%.3g", rel));
        }
    }
    c.note("max rel " + fmt("%.3g", worst));
    return c;
}

// 4. Degenerate parameters.
Check degenerations() {
    Check c;
    const ExecutionOrder order{kX, kT};
    const TimeGrid grid(kT, 252);
    const auto v = vwap(order, grid);
    const auto dd = PriceModel::dd(100, 0.3, 5);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = simulate_path(dd, grid, seed);
        c.expect(closed_form_optimal(order, dd, p, 0.0, 100).holdings == v.holdings, "lc=0 closed form");
        c.expect(closed_form_optimal(order, dd, p, 1e5, 0.0).holdings == v.holdings, "L=0 closed form");
        c.expect(closed_form_optimal(order, PriceModel::gbm(100, 0.3), simulate_path(PriceModel::gbm(100, 0.3), grid, seed),
                                     0.0, 0.0).holdings == v.holdings, "GBM closed form");
    }
    for (const auto& m : {dd, PriceModel::abm(100, 0.3)}) {
        c.expect(solve_bvp_series(order, m, sae_k(m, 0.0, 1e-3), grid).holdings == v.holdings, "SAE series L=0");
        c.expect(sup_diff(solve_bvp_fd(order, m, 0.0, 252).holdings, v.holdings) <= 1e-9 * kX, "SAE FD L=0");
    }
    auto cfg = preset_fig1();
    cfg.leverage_L = 0.0;
    for (const auto& r : run_comparison(cfg).runs)
        c.expect(r.trajectory.holdings == v.holdings, std::string(to_string(r.combination)) + " at L=0");

    const auto gbm = PriceModel::gbm(100, 0.3);
    const auto dd0 = PriceModel::dd(100, 0.3, 0.0);
    bool identical = true;
    const double lc = var_lambda(0.95, 0.3, kT) / 2e-6;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto pg = simulate_path(gbm, grid, seed);
        const auto pd = simulate_path(dd0, grid, seed);
        identical &= pg.values == pd.values;
        const auto xg = closed_form_optimal(order, gbm, pg, lc, 100);
        const auto xd = closed_form_optimal(order, dd0, pd, lc, 100);
        identical &= xg.holdings == xd.holdings && xg.rate == xd.rate;
    }
    identical &= value_function_closed_form(order, gbm, lc, 100) == value_function_closed_form(order, dd0, lc, 100);
    const double k = sae_k(gbm, 100, 1e-3);
    identical &= solve_bvp_series(order, gbm, k, grid).holdings == solve_bvp_series(order, dd0, k, grid).holdings;
    identical &= map_lambda_vwap(lc, gbm, kX, kT) == map_lambda_vwap(lc, dd0, kX, kT);
    c.expect(identical, "K=0 DD differs from GBM");

    double prev_var = 1.0, prev_es = 1.0;
    for (double s : {1e-1, 1e-2, 1e-4, 1e-6, 1e-8}) {
        const double lv = var_lambda(0.95, s, 1.0), le = es_lambda(0.95, s, 1.0);
        c.expect(lv < prev_var && le < prev_es, "lambda not decreasing at sigma sqrt h = " + fmt("%g", s));
        prev_var = lv;
        prev_es = le;
    }
    c.expect(prev_var < 1e-7 && prev_es < 1e-7, "lambda at sigma sqrt h = 1e-8 not near 0");
    for (double a : {0.9, 0.95, 0.99})
        for (double s : {0.1, 0.3, 0.6})
            for (double h : {1.0 / 252, 1.0 / 52}) {
                const double lv = var_lambda(a, s, h), le = es_lambda(a, s, h);
                c.expect(le >= lv && lv > 0 && le < 1, "ES < VaR at alpha " + fmt("%g", a));
            }
    return c;
}

struct FigureStats {
    std::vector<std::vector<double>> deviation;  // [seed][combination]
    std::vector<bool> dd_above_gbm;
    std::vector<double> gbm_min;
    std::vector<double> gbm_min_before_end;
};

FigureStats collect(ScenarioConfig cfg, std::size_t n_seeds) {
    FigureStats s;
    for (std::size_t seed = 0; seed < n_seeds; ++seed) {
        cfg.seed = seed;
        const auto run = run_comparison(cfg);
        std::vector<double> dev;
        for (auto comb : kAllCombinations) dev.push_back(run.find(comb)->max_vwap_deviation);
        s.deviation.push_back(dev);
        const auto& xd = run.find(Combination::DdVar)->trajectory.holdings;
        const auto& xg = run.find(Combination::GbmVar)->trajectory.holdings;
        bool above = true;
        for (std::size_t i = 1; i + 1 < xd.size(); ++i) above &= xd[i] >= xg[i];
        s.dd_above_gbm.push_back(above);
        s.gbm_min.push_back(run.find(Combination::GbmVar)->min_holdings);
        s.gbm_min_before_end.push_back(*std::min_element(xg.begin(), xg.end() - 1));
    }
    return s;
}

// 5. Figure claims over 1000 common seeds.
std::vector<Check> figure_claims() {
    constexpr std::size_t n = 1000;
    const auto f1 = collect(preset_fig1(), n);
    const auto f2 = collect(preset_fig2(), n);
    const auto f3 = collect(preset_fig3(), n);
    const auto f4 = collect(preset_fig4(), n);

    Check a;
    std::size_t violations = 0;
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t j = 0; j < kAllCombinations.size(); ++j) violations += !(f2.deviation[s][j] < f1.deviation[s][j]);
    a.expect(violations == 0, std::to_string(violations) + " seed/combination pairs not smaller");
    a.note(std::to_string(n) + " seeds x 4 combinations");

    Check b;
    const double frac = std::count(f3.dd_above_gbm.begin(), f3.dd_above_gbm.end(), true) / static_cast<double>(n);
    b.expect(frac >= 0.95, "fraction " + fmt("%.3f", frac));
    b.note("DD+VaR >= GBM+VaR on " + fmt("%.1f", 100 * frac) + "% of seeds");

    Check c;
    const auto negative = std::count_if(f4.gbm_min.begin(), f4.gbm_min.end(), [](double m) { return m < 0.0; });
    const double lowest = *std::min_element(f4.gbm_min_before_end.begin(), f4.gbm_min_before_end.end());
    double max_dev = 0.0;
    for (const auto& d : f4.deviation) max_dev = std::max(max_dev, d[2]);
    c.expect(negative > 0, "no seed has negative holdings");
    c.note(std::to_string(negative) + "/" + std::to_string(n) + " negative; min x(t<T)/X " + fmt("%.3g", lowest / kX) +
           ", max |x - vwap|/X " + fmt("%.3g", max_dev));
    return {a, b, c};
}

// 6. Structural invariants on the fig1 scenario.
Check structural() {
    Check c;
    const ExecutionOrder order{kX, kT};
    const TimeGrid grid(kT, 252);
    const auto m = PriceModel::dd(100, 0.3, 5);
    const double lc = var_lambda(0.95, 0.3, kT) / 2e-6;
    const ImpactParams impact{2e-6, 0.0};

    double worst_cost_gap = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = simulate_path(m, grid, seed);
        const auto x = closed_form_optimal(order, m, p, lc, 100);
        c.expect(x.holdings.front() == kX && x.holdings.back() == 0.0, "closed-form boundary");

        // Adaptedness: changing the path after t_i leaves x(t_0..t_i) unchanged.
        for (std::size_t cut : {0u, 50u, 125u, 250u}) {
            auto q = p;
            for (std::size_t j = cut + 1; j < q.values.size(); ++j) q.values[j] *= 1.5;
            const auto y = closed_form_optimal(order, m, q, lc, 100);
            c.expect(std::equal(x.holdings.begin(), x.holdings.begin() + cut + 1, y.holdings.begin()), "not adapted");
        }

        double variation = 0.0, max_rate = 0.0;
        for (std::size_t i = 0; i < grid.n_steps; ++i) variation += std::abs(p.values[i + 1] - p.values[i]);
        for (double r : x.rate) max_rate = std::max(max_rate, std::abs(r));
        const double gap = std::abs(execution_cost(x, p, impact) - execution_cost_direct(x, p, impact));
        const double tol = grid.dt() * max_rate * variation + 1e-12 * kX * 100;
        c.expect(gap <= tol, "cost identity seed " + std::to_string(seed));
        worst_cost_gap = std::max(worst_cost_gap, gap / tol);
    }

    const double k = sae_k(m, 100, fig1_lambda_sae());
    const auto r1 = solve_bvp_series_detailed(order, m, k, grid);
    const auto r2 = solve_bvp_series_detailed(order, m, k, grid);
    c.expect(r1.trajectory.holdings == r2.trajectory.holdings && r1.trajectory.rate == r2.trajectory.rate &&
                 r1.series.coefficients == r2.series.coefficients,
             "SAE solve not deterministic");
    c.expect(r1.trajectory.holdings.front() == kX && r1.trajectory.holdings.back() == 0.0, "SAE boundary");

    double worst_residual = 0.0;
    for (int i = 1; i < 20; ++i) {
        const double t = kT * i / 20.0;
        const double x = eval_series(r1.series, t);
        const double xdd = eval_series_derivative(r1.series, t, 2);
        const double rhs = k * k * sae_g(m, t) * x;
        worst_residual = std::max(worst_residual, std::abs(xdd - rhs) / std::max(std::abs(xdd), std::abs(rhs)));
    }
    c.expect(worst_residual <= 1e-8, "ODE residual " + fmt("%.3g", worst_residual));

    // Perturb the FD solution by +-1e-3 X sin(j pi t / T).
    const auto fd = solve_bvp_fd(order, m, k, 252);
    const double lsae = fig1_lambda_sae();
    auto objective = [&](const Trajectory& tr) {
        return trapezoid(grid.n_steps, grid.dt(), [&](std::size_t i) { return tr.rate[i] * tr.rate[i]; }) +
               eval_sae_risk(tr, m, lsae, 100).value;
    };
    const double base = objective(fd);
    for (double eps : {1e-3 * kX, -1e-3 * kX})
        for (int j : {1, 2, 3}) {
            auto y = fd;
            const double w = j * std::numbers::pi / kT;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                y.holdings[i] += eps * std::sin(w * grid.time(i));
                y.rate[i] += eps * w * std::cos(w * grid.time(i));
            }
            c.expect(objective(y) > base, "perturbation lowered objective");
        }
    c.note("cost gap <= " + fmt("%.2g", worst_cost_gap) + " of bound, ODE residual " + fmt("%.2g", worst_residual));
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 7. Byte-identical outputs across repeats and worker counts.
Check reproducibility() {
    Check c;
    const auto root = fs::temp_directory_path() / "ddexec_acceptance_repro";
    fs::remove_all(root);
    for (auto cfg : all_presets()) {
        cfg.mc_paths = 200;
        std::vector<fs::path> dirs;
        for (auto [tag, threads] : {std::pair{"serial_a", 1u}, std::pair{"serial_b", 1u}, std::pair{"parallel", 4u}}) {
            cfg.output_dir = (root / cfg.name / tag).string();
            run(cfg, {false, threads});
            dirs.emplace_back(cfg.output_dir);
        }
        for (const char* f : {"trajectories.csv", "summary.csv"}) {
            const auto ref = slurp(dirs[0] / f);
            c.expect(!ref.empty(), cfg.name + " " + f + " empty");
            for (std::size_t i = 1; i < dirs.size(); ++i)
                c.expect(slurp(dirs[i] / f) == ref, cfg.name + " " + f + " differs (" + dirs[i].filename().string() + ")");
        }
    }
    fs::remove_all(root);
    return c;
}

bool report(const char* id, const char* title, const Check& c) {
    std::printf("[%s] %s %s%s%s\n", c.ok ? "PASS" : "FAIL", id, title, c.detail.empty() ? "" : ": ", c.detail.c_str());
    std::fflush(stdout);
    return c.ok;
}

}  // namespace

int main() {
    bool all = true;
    auto guarded = [&](const char* id, const char* title, const std::function<Check()>& f) {
        Check c;
        try {
            c = f();
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        all &= report(id, title, c);
    };

    guarded("AC1", "value function vs Monte Carlo", value_function_validation);
    guarded("AC2", "series vs finite-difference solver", solver_cross_validation);
    guarded("AC3", "lambda mapping under VWAP", lambda_mapping);
    guarded("AC4", "degeneration suite", degenerations);

    std::vector<Check> fig;
    try {
        fig = figure_claims();
    } catch (const std::exception& e) {
        Check failed;
        failed.expect(false, std::string("exception: ") + e.what());
        fig = {failed, failed, failed};
    }
    all &= report("AC5a", "fig2 deviates less from VWAP than fig1", fig[0]);
    all &= report("AC5b", "fig3 DD+VaR holdings above GBM+VaR", fig[1]);
    all &= report("AC5c", "fig4 GBM+VaR holdings go negative", fig[2]);

    guarded("AC6", "structural invariants", structural);
    guarded("AC7", "reproducible outputs", reproducibility);
    return all ? 0 : 1;
}
