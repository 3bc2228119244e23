#pragma once

// Liquidation schedules for the tail-risk (VaR/ES) criteria under DD/GBM
// dynamics, the VWAP baseline, and realised execution cost.

#include "ddexec/error.hpp"
#include "ddexec/models.hpp"
#include "ddexec/quadrature.hpp"
#include "ddexec/trajectory.hpp"

#include <cmath>
#include <vector>

namespace ddexec {

/// Linear liquidation x(t) = X (T - t) / T.
inline Trajectory vwap(const ExecutionOrder& order, const TimeGrid& grid) {
    order.validate();
    detail::require_grid_matches_order(grid, order, "vwap");
    Trajectory traj{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
    const double rate = -order.x_total / order.t_end;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        traj.holdings[i] = grid.remaining_fraction(i) * order.x_total;
        traj.rate[i] = rate;
    }
    return traj;
}

/// Adapted optimal schedule for cost + L * lambda_check * integral x (S - K) dt:
///
///   x*(t) = (T - t)/T * [X - lambda_check L (T/4) integral_0^t (S_u - K) du]
///
/// The running integral is a trapezoid over the path, so x*(t_i) only reads
/// path values up to t_i. The rate is the analytic derivative
///
///   xdot*(t) = -(1/T)[X - lambda_check L (T/4) I_t] - ((T - t)/4) lambda_check L (S_t - K).
inline Trajectory closed_form_optimal(const ExecutionOrder& order, const PriceModel& model, const PricePath& path,
                                      double lambda_check, double leverage_L) {
    order.validate();
    detail::require(model.kind != ModelKind::ABM, "closed_form_optimal: requires DD or GBM dynamics");
    detail::require(lambda_check >= 0.0 && leverage_L >= 0.0, "closed_form_optimal: lambda_check and L must be >= 0");
    const TimeGrid& grid = path.grid;
    detail::require_grid_matches_order(grid, order, "closed_form_optimal");
    detail::require(path.values.size() == grid.size(), "closed_form_optimal: path length does not match grid");

    const double t_end = order.t_end;
    const double weight = lambda_check * leverage_L;
    const double c = weight * t_end / 4.0;
    const double k = model.shift();
    const double dt = grid.dt();

    Trajectory traj{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
    double integral = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0) integral += 0.5 * dt * ((path.values[i - 1] - k) + (path.values[i] - k));
        const double bracket = order.x_total - c * integral;
        traj.holdings[i] = grid.remaining_fraction(i) * bracket;
        traj.rate[i] = -bracket / t_end - 0.25 * (t_end - grid.time(i)) * weight * (path.values[i] - k);
    }
    return traj;
}

namespace detail {

// (e^x - 1 - x - x^2/2) / x^3, finite at x = 0 (limit 1/6).
inline double exp_remainder3_over_cube(double x) {
    if (std::abs(x) < 0.5) {
        double term = 1.0 / 6.0;
        double sum = term;
        for (int n = 4; n < 40; ++n) {
            term *= x / n;
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::expm1(x) - x - 0.5 * x * x) / (x * x * x);
}

}  // namespace detail

/// Expected objective under the optimal schedule:
///
///   X^2/T + L lc T X (S0 - K)/2 - (L lc)^2/(8 sigma^6) (S0 - K)^2 (e^{s^2 T} - 1 - s^2 T - s^4 T^2/2)
///
/// The last factor is evaluated as T^3 * R(s^2 T) / 8 with R(x) = (e^x - 1 - x - x^2/2)/x^3,
/// which is exact for sigma > 0 and continuous at sigma = 0.
inline double value_function_closed_form(const ExecutionOrder& order, const PriceModel& model, double lambda_check,
                                         double leverage_L) {
    order.validate();
    detail::require(model.kind != ModelKind::ABM, "value_function_closed_form: requires DD or GBM dynamics");
    const double x = order.x_total;
    const double t = order.t_end;
    const double y0 = model.y0();
    const double weight = leverage_L * lambda_check;
    const double s2t = model.sigma * model.sigma * t;
    const double correction = weight * weight / 8.0 * y0 * y0 * t * t * t * detail::exp_remainder3_over_cube(s2t);
    return x * x / t + weight * t * x * y0 / 2.0 - correction;
}

/// Realised execution cost, split into its parts.
struct CostBreakdown {
    double proceeds_term = 0.0;    // -X S0
    double price_risk_term = 0.0;  // -sum x(t_i)(S_{i+1} - S_i)
    double temporary_term = 0.0;   // eta * integral xdot^2
    double permanent_term = 0.0;   // gamma X^2 / 2

    double total() const { return proceeds_term + price_risk_term + temporary_term + permanent_term; }
    /// Cost measured against the pre-trade mid price.
    double implementation_shortfall() const { return total() - proceeds_term; }
};

inline CostBreakdown execution_cost_breakdown(const Trajectory& traj, const PricePath& path, const ImpactParams& impact) {
    impact.validate();
    detail::require_same_grid(traj.grid, path.grid, "execution_cost");
    const double x0 = traj.holdings.front();
    const std::size_t n = traj.grid.n_steps;

    CostBreakdown cost;
    cost.proceeds_term = -x0 * path.values.front();
    // Left-point sum: the non-anticipating discretisation of integral x dS.
    double stochastic = 0.0;
    for (std::size_t i = 0; i < n; ++i) stochastic += traj.holdings[i] * (path.values[i + 1] - path.values[i]);
    cost.price_risk_term = -stochastic;
    cost.temporary_term = impact.eta * trapezoid(n, traj.grid.dt(), [&](std::size_t i) { return traj.rate[i] * traj.rate[i]; });
    cost.permanent_term = impact.gamma * x0 * x0 / 2.0;
    return cost;
}

/// C(x) = -X S0 - integral x dS + eta integral xdot^2 dt + gamma X^2 / 2.
inline double execution_cost(const Trajectory& traj, const PricePath& path, const ImpactParams& impact) {
    return execution_cost_breakdown(traj, path, impact).total();
}

/// The same cost before integration by parts: integral of S_tilde * xdot dt with
/// S_tilde = S + eta xdot + gamma (x - X), trapezoid on the grid.
inline double execution_cost_direct(const Trajectory& traj, const PricePath& path, const ImpactParams& impact) {
    impact.validate();
    detail::require_same_grid(traj.grid, path.grid, "execution_cost_direct");
    const double x0 = traj.holdings.front();
    return trapezoid(traj.grid.n_steps, traj.grid.dt(), [&](std::size_t i) {
        const double xdot = traj.rate[i];
        const double exec_price = path.values[i] + impact.eta * xdot + impact.gamma * (traj.holdings[i] - x0);
        return exec_price * xdot;
    });
}

}  // namespace ddexec
