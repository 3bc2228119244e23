#pragma once

// Mid-price dynamics: arithmetic, geometric and displaced-diffusion Brownian
// motion, exact path simulation and a few closed-form helpers.
//
//   ABM:  dS = sigma * S0 * dW
//   GBM:  dS = sigma * S * dW
//   DD:   S = K + Y,  dY = sigma * Y * dW,  Y0 = S0 - K

#include "ddexec/error.hpp"
#include "ddexec/normal.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ddexec {

enum class ModelKind { ABM, GBM, DD };

inline std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::ABM: return "ABM";
        case ModelKind::GBM: return "GBM";
        case ModelKind::DD: return "DD";
    }
    return "?";
}

struct PriceModel {
    ModelKind kind = ModelKind::GBM;
    double s0 = 100.0;
    double sigma = 0.3;     // per sqrt(year); for ABM a percentage of S0
    double shift_k = 0.0;   // DD only; 0 for GBM, ignored for ABM

    static PriceModel abm(double s0, double sigma) { return {ModelKind::ABM, s0, sigma, 0.0}; }
    static PriceModel gbm(double s0, double sigma) { return {ModelKind::GBM, s0, sigma, 0.0}; }
    static PriceModel dd(double s0, double sigma, double k) { return {ModelKind::DD, s0, sigma, k}; }

    /// Shift actually applied to the price. ABM has none.
    double shift() const { return kind == ModelKind::DD ? shift_k : 0.0; }

    /// Y0 = S0 - K, the initial level of the lognormal component.
    double y0() const { return s0 - shift(); }

    void validate() const {
        detail::require(std::isfinite(s0) && s0 > 0.0, "PriceModel: s0 must be positive");
        detail::require(std::isfinite(sigma) && sigma >= 0.0, "PriceModel: sigma must be non-negative");
        detail::require(std::isfinite(shift_k), "PriceModel: shift_k must be finite");
        if (kind == ModelKind::GBM)
            detail::require(shift_k == 0.0, "PriceModel: GBM requires shift_k = 0");
        if (kind == ModelKind::DD)
            detail::require(y0() > 0.0, "PriceModel: DD requires s0 - shift_k > 0");
    }

    friend bool operator==(const PriceModel&, const PriceModel&) = default;
};

/// Uniform grid on [0, t_end].
struct TimeGrid {
    double t_end = 1.0;
    std::size_t n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double t_end_, std::size_t n_steps_) : t_end(t_end_), n_steps(n_steps_) {
        detail::require(std::isfinite(t_end) && t_end > 0.0, "TimeGrid: t_end must be positive");
        detail::require(n_steps >= 1, "TimeGrid: n_steps must be >= 1");
    }

    double dt() const { return t_end / static_cast<double>(n_steps); }
    std::size_t size() const { return n_steps + 1; }

    // t_end * i / n keeps t_0 = 0 and t_n = t_end exact.
    double time(std::size_t i) const {
        return t_end * static_cast<double>(i) / static_cast<double>(n_steps);
    }

    /// Fraction of the horizon still remaining at node i, (T - t_i) / T.
    double remaining_fraction(std::size_t i) const {
        return static_cast<double>(n_steps - i) / static_cast<double>(n_steps);
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct PricePath {
    TimeGrid grid;
    std::vector<double> values;
    std::uint64_t seed = 0;
};

/// Simulates a path from pre-drawn standard normals z (size n_steps).
///
/// DD/GBM step the lognormal component exactly in log space, so there is no
/// discretisation bias and the path never touches K. ABM is an exact
/// Gaussian walk and may go negative.
inline PricePath simulate_path_from_normals(const PriceModel& model, const TimeGrid& grid,
                                            std::span<const double> z, std::uint64_t seed = 0) {
    model.validate();
    detail::require(grid.dt() > 0.0, "simulate_path: non-positive time step");
    detail::require(z.size() == grid.n_steps, "simulate_path: need one normal draw per step");

    PricePath path{grid, std::vector<double>(grid.size()), seed};
    const double dt = grid.dt();
    const double sq_dt = std::sqrt(dt);
    path.values[0] = model.s0;

    if (model.kind == ModelKind::ABM) {
        const double abs_vol = model.sigma * model.s0 * sq_dt;
        for (std::size_t i = 0; i < grid.n_steps; ++i) path.values[i + 1] = path.values[i] + abs_vol * z[i];
        return path;
    }

    const double k = model.shift();
    const double drift = -0.5 * model.sigma * model.sigma * dt;
    const double vol = model.sigma * sq_dt;
    double y = model.y0();
    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        y *= std::exp(drift + vol * z[i]);
        path.values[i + 1] = k + y;
    }
    return path;
}

/// Simulates a path driven by the normal sequence of `seed`. The draws do
/// not depend on the model kind, so models sharing a seed share the
/// Brownian path.
inline PricePath simulate_path(const PriceModel& model, const TimeGrid& grid, std::uint64_t seed) {
    const auto z = standard_normals(seed, grid.n_steps);
    return simulate_path_from_normals(model, grid, z, seed);
}

/// P(S_t < 0).
///
/// DD with K < 0 has the closed form Phi((-ln(1 - S0/K) + sigma^2 t/2) / (sigma sqrt t));
/// DD/GBM with K >= 0 cannot go negative. The ABM branch, Phi(-1/(sigma sqrt t)),
/// is our extension by analogy: S_t ~ N(S0, (sigma S0)^2 t).
inline double prob_negative(const PriceModel& model, double t) {
    detail::require(t > 0.0, "prob_negative: t must be positive");
    model.validate();
    if (model.sigma == 0.0) return 0.0;
    const double sd = model.sigma * std::sqrt(t);
    if (model.kind == ModelKind::ABM) return normal_cdf(-1.0 / sd);
    const double k = model.shift();
    if (k >= 0.0) return 0.0;
    return normal_cdf((-std::log(1.0 - model.s0 / k) + 0.5 * model.sigma * model.sigma * t) / sd);
}

/// Absolute (currency) volatility at price level s.
inline double absolute_vol(const PriceModel& model, double s) {
    switch (model.kind) {
        case ModelKind::ABM: return model.sigma * model.s0;
        case ModelKind::GBM: return model.sigma * s;
        case ModelKind::DD: return model.sigma * (s - model.shift_k);
    }
    return 0.0;
}

/// DD volatility whose initial absolute volatility matches a GBM with sigma_gbm.
inline double rescale_dd_vol(double sigma_gbm, double s0, double k) {
    detail::require(s0 > k, "rescale_dd_vol: requires s0 > k");
    return sigma_gbm * s0 / (s0 - k);
}

}  // namespace ddexec
