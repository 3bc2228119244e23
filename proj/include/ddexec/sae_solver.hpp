#pragma once

// Optimal schedule under the squared-asset-expectation criterion.
//
// Minimising integral xdot^2 + L lambda sigma^2 x^2 g(t) dt with x(0) = X,
// x(T) = 0 gives the linear boundary-value problem
//
//     xddot = k^2 g(t) x,   k = sigma sqrt(L lambda),   g(t) = E[S_t^2].
//
// With g(t) = Y0^2 (alpha0 + e^{v t}), alpha0 = (K/Y0)^2 + 2K/Y0, v = sigma^2,
// a power series x = sum a_j t^j solves it through
//
//     a_{j+2} = kbar^2 / ((j+2)(j+1)) * [(1 + alpha0) a_j + sum_{i=1..j} a_{j-i} v^i / i!]
//
// with kbar^2 = (Y0 k)^2. a0 = X; a1 is fixed by x(T) = 0. The solution is
// affine in a1, so the terminal condition is met in one linear step.
//
// The solver works in tau = t / T so coefficient magnitudes stay near X.

#include "ddexec/error.hpp"
#include "ddexec/models.hpp"
#include "ddexec/risk.hpp"
#include "ddexec/strategy.hpp"
#include "ddexec/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ddexec {

struct SeriesSolution {
    std::vector<double> coefficients;  // a_0..a_m in the variable t / time_scale
    std::size_t truncation_m = 0;
    double kbar_sq = 0.0;
    double alpha0 = 0.0;
    double v = 0.0;
    double time_scale = 1.0;  // series is valid for t in [0, time_scale]
};

/// Runs the coefficient recursion for j = 0..m-2.
///
/// Throws NumericalError when a coefficient exceeds magnitude_bound; that
/// signals the series variable needs rescaling.
inline SeriesSolution taylor_coefficients(double a0, double a1, double kbar_sq, double alpha0, double v, std::size_t m,
                                          double magnitude_bound = 1e250) {
    detail::require(m >= 2, "taylor_coefficients: m must be >= 2");
    detail::require(kbar_sq >= 0.0, "taylor_coefficients: kbar_sq must be >= 0");

    std::vector<double> v_pow(m + 1);  // v^i / i!
    v_pow[0] = 1.0;
    for (std::size_t i = 1; i <= m; ++i) v_pow[i] = v_pow[i - 1] * v / static_cast<double>(i);

    std::vector<double> a(m + 1, 0.0);
    a[0] = a0;
    a[1] = a1;
    for (std::size_t j = 0; j + 2 <= m; ++j) {
        double s = (1.0 + alpha0) * a[j];
        for (std::size_t i = 1; i <= j; ++i) s += a[j - i] * v_pow[i];
        a[j + 2] = kbar_sq / (static_cast<double>(j + 2) * static_cast<double>(j + 1)) * s;
        if (!std::isfinite(a[j + 2]) || std::abs(a[j + 2]) > magnitude_bound) {
            throw NumericalError("taylor_coefficients: coefficient a_" + std::to_string(j + 2) +
                                 " exceeds magnitude bound; rescale time");
        }
    }
    return {std::move(a), m, kbar_sq, alpha0, v, 1.0};
}

namespace detail {

inline double series_variable(const SeriesSolution& sol, double t) {
    const double tau = t / sol.time_scale;
    if (!(tau >= 0.0 && tau <= 1.0 + 1e-12))
        throw std::domain_error("eval_series: t outside the validated range [0, " + std::to_string(sol.time_scale) + "]");
    return tau;
}

}  // namespace detail

/// Horner evaluation of the truncated series.
inline double eval_series(const SeriesSolution& sol, double t) {
    const double tau = detail::series_variable(sol, t);
    double acc = 0.0;
    for (auto it = sol.coefficients.rbegin(); it != sol.coefficients.rend(); ++it) acc = acc * tau + *it;
    return acc;
}

/// d^order x / dt^order of the truncated series (order 1 or 2).
inline double eval_series_derivative(const SeriesSolution& sol, double t, int order = 1) {
    detail::require(order == 1 || order == 2, "eval_series_derivative: order must be 1 or 2");
    const double tau = detail::series_variable(sol, t);
    const auto& a = sol.coefficients;
    double acc = 0.0;
    for (std::size_t j = a.size(); j-- > static_cast<std::size_t>(order);) {
        const double factor = order == 1 ? static_cast<double>(j) : static_cast<double>(j) * static_cast<double>(j - 1);
        acc = acc * tau + factor * a[j];
    }
    return acc / std::pow(sol.time_scale, order);
}

/// |a_m| relative to the largest coefficient, using the last two terms so a
/// vanishing odd or even subsequence cannot fake convergence.
inline double tail_decay(const SeriesSolution& sol) {
    const auto& a = sol.coefficients;
    double biggest = 0.0;
    for (double c : a) biggest = std::max(biggest, std::abs(c));
    if (biggest == 0.0) return 0.0;
    const std::size_t m = a.size() - 1;
    return std::max(std::abs(a[m]), std::abs(a[m - 1])) / biggest;
}

struct SeriesSolverOptions {
    std::size_t m_start = 16;
    std::size_t m_cap = 512;
    double tail_tolerance = 1e-12;
    double terminal_tolerance = 1e-9;  // |x(T)| allowed, relative to X
};

struct SeriesBvpResult {
    Trajectory trajectory;
    SeriesSolution series;
    double terminal_residual = 0.0;  // x(T) before the grid endpoint is pinned to 0
};

namespace detail {

struct OdeCoefficients {
    double kbar_sq;
    double alpha0;
    double v;
};

// Coefficients of xddot = k^2 g(t) x in (kbar^2, alpha0, v) form.
inline OdeCoefficients sae_ode_coefficients(const PriceModel& model, double k) {
    if (model.kind == ModelKind::ABM) {
        const double c = k * model.s0;
        return {c * c, 0.0, 0.0};
    }
    const double y0 = model.y0();
    require(y0 > 0.0, "sae solver: requires S0 - K > 0");
    const double ratio = model.shift() / y0;
    return {(y0 * k) * (y0 * k), ratio * ratio + 2.0 * ratio, model.sigma * model.sigma};
}

}  // namespace detail

/// Solves xddot = k^2 g(t) x, x(0) = X, x(T) = 0 by power series and samples
/// the result on `grid`.
inline SeriesBvpResult solve_bvp_series_detailed(const ExecutionOrder& order, const PriceModel& model, double k,
                                                 const TimeGrid& grid, const SeriesSolverOptions& opts = {}) {
    order.validate();
    model.validate();
    detail::require(std::isfinite(k) && k >= 0.0, "solve_bvp_series: k must be >= 0");
    detail::require_grid_matches_order(grid, order, "solve_bvp_series");

    const double t_end = order.t_end;
    const double x_total = order.x_total;
    const auto ode = detail::sae_ode_coefficients(model, k);
    const double kbar_sq = ode.kbar_sq * t_end * t_end;
    const double v = ode.v * t_end;

    auto build = [&](double b0, double b1, std::size_t m) {
        auto sol = taylor_coefficients(b0, b1, kbar_sq, ode.alpha0, v, m);
        sol.kbar_sq = ode.kbar_sq;
        sol.v = ode.v;
        sol.time_scale = t_end;
        return sol;
    };

    std::size_t m = opts.m_start;
    SeriesSolution from_x0, from_slope;
    for (;; m *= 2) {
        if (m > opts.m_cap)
            throw NumericalError("solve_bvp_series: series did not converge by m = " + std::to_string(opts.m_cap));
        from_x0 = build(x_total, 0.0, m);
        from_slope = build(0.0, 1.0, m);
        if (tail_decay(from_x0) <= opts.tail_tolerance && tail_decay(from_slope) <= opts.tail_tolerance) break;
    }

    // x(T; b1) = A + B b1 with B >= 1 since kbar_sq >= 0.
    const double a_end = eval_series(from_x0, t_end);
    const double b_end = eval_series(from_slope, t_end);
    double slope = -a_end / b_end;
    SeriesSolution sol = build(x_total, slope, m);
    double residual = eval_series(sol, t_end);

    const double tol = opts.terminal_tolerance * x_total;
    if (!(std::abs(residual) <= tol)) {
        // Bisection fallback for severe cancellation in A + B b1.
        auto f = [&](double b1) { return eval_series(build(x_total, b1, m), t_end); };
        double width = std::max(std::abs(slope), x_total) * 1e-6;
        double lo = slope - width, hi = slope + width;
        int expansions = 0;
        while (f(lo) * f(hi) > 0.0) {
            width *= 2.0;
            lo = slope - width;
            hi = slope + width;
            if (++expansions > 200) throw NumericalError("solve_bvp_series: root bracket for a1 not found");
        }
        for (int it = 0; it < 200 && std::abs(residual) > tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (f(lo) * fm <= 0.0) hi = mid; else lo = mid;
            slope = mid;
            residual = fm;
        }
        if (!(std::abs(residual) <= tol))
            throw NumericalError("solve_bvp_series: terminal condition not met, |x(T)| = " + std::to_string(std::abs(residual)));
        sol = build(x_total, slope, m);
    }

    // k = 0: xddot = 0, the VWAP line, reproduced exactly.
    if (kbar_sq == 0.0) return {vwap(order, grid), std::move(sol), residual};

    Trajectory traj{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.time(i);
        traj.holdings[i] = eval_series(sol, t);
        traj.rate[i] = eval_series_derivative(sol, t, 1);
    }
    traj.holdings.back() = 0.0;
    return {std::move(traj), std::move(sol), residual};
}

inline Trajectory solve_bvp_series(const ExecutionOrder& order, const PriceModel& model, double k, const TimeGrid& grid,
                                   const SeriesSolverOptions& opts = {}) {
    return solve_bvp_series_detailed(order, model, k, grid, opts).trajectory;
}

/// Finite-difference solution of the same boundary-value problem: central
/// second differences give a tridiagonal system, solved by the Thomas
/// algorithm. Rates come from second-order differences of the solution.
inline Trajectory solve_bvp_fd(const ExecutionOrder& order, const PriceModel& model, double k, std::size_t n_steps) {
    order.validate();
    model.validate();
    detail::require(n_steps >= 3, "solve_bvp_fd: n_steps must be >= 3");
    detail::require(std::isfinite(k) && k >= 0.0, "solve_bvp_fd: k must be >= 0");

    const TimeGrid grid(order.t_end, n_steps);
    const double h = grid.dt();
    const std::size_t n_inner = n_steps - 1;
    const double k2h2 = k * k * h * h;

    // Row i (node i+1): x_i - (2 + h^2 k^2 g_i) x_{i+1} + x_{i+2} = 0.
    std::vector<double> diag(n_inner), rhs(n_inner, 0.0);
    for (std::size_t i = 0; i < n_inner; ++i) {
        const double q = k2h2 * sae_g(model, grid.time(i + 1));
        detail::require(q >= 0.0, "solve_bvp_fd: k^2 g must be non-negative");
        diag[i] = -(2.0 + q);
    }
    rhs[0] = -order.x_total;

    // Thomas algorithm with unit off-diagonals; |diag| >= 2 keeps it stable.
    std::vector<double> c_prime(n_inner), d_prime(n_inner);
    c_prime[0] = 1.0 / diag[0];
    d_prime[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n_inner; ++i) {
        const double denom = diag[i] - c_prime[i - 1];
        if (denom == 0.0) throw NumericalError("solve_bvp_fd: singular tridiagonal system");
        c_prime[i] = 1.0 / denom;
        d_prime[i] = (rhs[i] - d_prime[i - 1]) / denom;
    }

    Trajectory traj{grid, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
    auto& x = traj.holdings;
    x[0] = order.x_total;
    x[n_steps] = 0.0;
    x[n_inner] = d_prime[n_inner - 1];
    for (std::size_t i = n_inner - 1; i-- > 0;) x[i + 1] = d_prime[i] - c_prime[i] * x[i + 2];

    auto& r = traj.rate;
    r[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
    for (std::size_t i = 1; i < n_steps; ++i) r[i] = (x[i + 1] - x[i - 1]) / (2.0 * h);
    r[n_steps] = (3.0 * x[n_steps] - 4.0 * x[n_steps - 1] + x[n_steps - 2]) / (2.0 * h);
    return traj;
}

/// k = sigma sqrt(L lambda).
inline double sae_k(const PriceModel& model, double leverage_L, double lambda_sae) {
    detail::require(leverage_L >= 0.0 && lambda_sae >= 0.0, "sae_k: L and lambda must be >= 0");
    return model.sigma * std::sqrt(leverage_L * lambda_sae);
}

}  // namespace ddexec
