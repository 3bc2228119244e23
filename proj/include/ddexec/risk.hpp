#pragma once

// Risk functionals for liquidation schedules.
//
// VaR and ES of a position x(t) over [t, t+h) under DD dynamics are linear in
// x(t) * (S_t - K); the proportionality constants lambda_tilde (VaR) and
// lambda_hat (ES) depend only on (alpha, sigma, h). The squared-asset
// expectation (SAE) criterion instead weights x^2 by sigma^2 * E[S_t^2].

#include "ddexec/error.hpp"
#include "ddexec/models.hpp"
#include "ddexec/normal.hpp"
#include "ddexec/quadrature.hpp"
#include "ddexec/trajectory.hpp"

#include <cmath>
#include <optional>
#include <string_view>

namespace ddexec {

enum class RiskCriterion { VaR, ES, SAE };

inline std::string_view to_string(RiskCriterion c) {
    switch (c) {
        case RiskCriterion::VaR: return "VaR";
        case RiskCriterion::ES: return "ES";
        case RiskCriterion::SAE: return "SAE";
    }
    return "?";
}

namespace detail {

inline void check_tail_args(double alpha, double sigma, double h) {
    require(alpha > 0.0 && alpha < 1.0, "risk: alpha must lie in (0, 1)");
    require(std::isfinite(sigma) && sigma >= 0.0, "risk: sigma must be non-negative");
    require(std::isfinite(h) && h > 0.0, "risk: horizon h must be positive");
}

// ln(1 - lambda_tilde) = -sigma^2 h / 2 + sigma sqrt(h) q_{1-alpha}
inline double log_one_minus_var_lambda(double alpha, double sigma, double h) {
    return -0.5 * sigma * sigma * h + sigma * std::sqrt(h) * normal_quantile(1.0 - alpha);
}

}  // namespace detail

/// lambda_tilde = 1 - exp(-sigma^2 h/2 + sigma sqrt(h) q_{1-alpha}).
inline double var_lambda(double alpha, double sigma, double h) {
    detail::check_tail_args(alpha, sigma, h);
    return -std::expm1(detail::log_one_minus_var_lambda(alpha, sigma, h));
}

/// lambda_hat: expected relative loss beyond the VaR level.
inline double es_lambda(double alpha, double sigma, double h) {
    detail::check_tail_args(alpha, sigma, h);
    const double sd = sigma * std::sqrt(h);
    if (sd == 0.0) return 0.0;
    const double log_q = detail::log_one_minus_var_lambda(alpha, sigma, h);
    const double half_var = 0.5 * sigma * sigma * h;
    return (normal_cdf((log_q + half_var) / sd) - normal_cdf((log_q - half_var) / sd)) / (1.0 - alpha);
}

struct RiskSpec {
    RiskCriterion criterion = RiskCriterion::VaR;
    double alpha = 0.95;
    double horizon_h = 1.0 / 252.0;
    double leverage_L = 1.0;
    double lambda_sae = 0.0;  // exogenous, or from map_lambda_*
    double eta = 1.0;
    // Volatility fed to the endogenous lambda constants. Defaults to the
    // model's own sigma; comparisons across rescaled models pin it.
    std::optional<double> lambda_sigma;

    void validate() const {
        detail::require(alpha > 0.0 && alpha < 1.0, "RiskSpec: alpha must lie in (0, 1)");
        detail::require(horizon_h > 0.0, "RiskSpec: horizon_h must be positive");
        detail::require(leverage_L >= 0.0, "RiskSpec: leverage_L must be non-negative");
        detail::require(lambda_sae >= 0.0, "RiskSpec: lambda_sae must be non-negative");
        detail::require(eta > 0.0, "RiskSpec: eta must be positive");
    }

    /// lambda_bar for a tail criterion (lambda_tilde for VaR, lambda_hat for ES).
    double lambda_bar(RiskCriterion tail, double model_sigma) const {
        const double sigma = lambda_sigma.value_or(model_sigma);
        switch (tail) {
            case RiskCriterion::VaR: return var_lambda(alpha, sigma, horizon_h);
            case RiskCriterion::ES: return es_lambda(alpha, sigma, horizon_h);
            case RiskCriterion::SAE: break;
        }
        throw std::invalid_argument("RiskSpec: SAE has no endogenous lambda");
    }

    /// lambda_check = lambda_bar / eta, the risk weight in the eta-normalised objective.
    double lambda_check(RiskCriterion tail, double model_sigma) const {
        const double lc = lambda_bar(tail, model_sigma) / eta;
        detail::require(std::isfinite(lc) && lc >= 0.0, "RiskSpec: lambda_check must be finite and >= 0");
        return lc;
    }
};

struct RiskValue {
    double value = 0.0;
    RiskCriterion criterion = RiskCriterion::VaR;
};

/// g(t) = E[S_t^2].
///
/// DD/GBM: Y0^2 [(K/Y0)^2 + 2K/Y0 + exp(sigma^2 t)], evaluated as
/// S0^2 + Y0^2 expm1(sigma^2 t) so that g(0) = S0^2 exactly. ABM: S0^2.
inline double sae_g(const PriceModel& model, double t) {
    detail::require(t >= 0.0, "sae_g: t must be non-negative");
    if (model.kind == ModelKind::ABM) return model.s0 * model.s0;
    const double y0 = model.y0();
    detail::require(y0 != 0.0, "sae_g: DD requires Y0 != 0");
    return model.s0 * model.s0 + y0 * y0 * std::expm1(model.sigma * model.sigma * t);
}

/// lambda_SAE matching the tail risk of a constant position x = X.
inline double map_lambda_constant(double lambda_check, const PriceModel& model, double x_total) {
    detail::require(lambda_check >= 0.0, "map_lambda_constant: lambda_check must be >= 0");
    detail::require(x_total > 0.0 && model.sigma > 0.0, "map_lambda_constant: need X > 0 and sigma > 0");
    return lambda_check * model.y0() / (x_total * model.sigma * model.sigma * model.s0 * model.s0);
}

/// lambda_SAE matching the tail risk of the VWAP schedule, using
/// exp(sigma^2 t) ~ 1 + sigma^2 t. The ABM comparison reuses the DD value.
inline double map_lambda_vwap(double lambda_check, const PriceModel& model, double x_total, double t_end) {
    detail::require(lambda_check >= 0.0, "map_lambda_vwap: lambda_check must be >= 0");
    detail::require(model.s0 > model.shift(), "map_lambda_vwap: requires S0 > K");
    detail::require(x_total > 0.0 && t_end > 0.0 && model.sigma > 0.0,
                    "map_lambda_vwap: need X > 0, T > 0 and sigma > 0");
    const double y0 = model.y0();
    const double s2 = model.sigma * model.sigma;
    const double bracket = s2 * t_end / 12.0 + model.s0 * model.s0 / (3.0 * y0 * y0);
    return lambda_check / (2.0 * x_total * s2) / (y0 * bracket);
}

/// lambda_bar * integral of x(t) (S_t - K) dt, trapezoid on the shared grid.
inline RiskValue eval_var_risk(const Trajectory& traj, const PricePath& path, double lambda_bar, double shift_k) {
    detail::require_same_grid(traj.grid, path.grid, "eval_var_risk");
    const double integral = trapezoid(traj.grid.n_steps, traj.grid.dt(), [&](std::size_t i) {
        return traj.holdings[i] * (path.values[i] - shift_k);
    });
    return {lambda_bar * integral, RiskCriterion::VaR};
}

/// L * lambda * sigma^2 * integral of x(t)^2 g(t) dt.
inline RiskValue eval_sae_risk(const Trajectory& traj, const PriceModel& model, double lambda_sae, double leverage_L) {
    const auto& grid = traj.grid;
    const double integral = trapezoid(grid.n_steps, grid.dt(), [&](std::size_t i) {
        const double x = traj.holdings[i];
        return x * x * sae_g(model, grid.time(i));
    });
    return {leverage_L * lambda_sae * model.sigma * model.sigma * integral, RiskCriterion::SAE};
}

}  // namespace ddexec
