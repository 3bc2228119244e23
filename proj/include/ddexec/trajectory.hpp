#pragma once

#include "ddexec/error.hpp"
#include "ddexec/models.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ddexec {

/// Sell X units over [0, T].
struct ExecutionOrder {
    double x_total = 1.0;
    double t_end = 1.0;

    void validate() const {
        detail::require(std::isfinite(x_total) && x_total > 0.0, "ExecutionOrder: x_total must be positive");
        detail::require(std::isfinite(t_end) && t_end > 0.0, "ExecutionOrder: t_end must be positive");
    }
};

/// Linear impact: execution price S + eta * xdot + gamma * (x - X).
struct ImpactParams {
    double eta = 1.0;
    double gamma = 0.0;

    void validate() const {
        detail::require(std::isfinite(eta) && eta > 0.0, "ImpactParams: eta must be positive");
        detail::require(std::isfinite(gamma) && gamma >= 0.0, "ImpactParams: gamma must be non-negative");
    }
};

/// Holdings x(t_i) still to execute and trading rate xdot(t_i) on a grid.
struct Trajectory {
    TimeGrid grid;
    std::vector<double> holdings;
    std::vector<double> rate;

    double min_holdings() const { return *std::min_element(holdings.begin(), holdings.end()); }

    /// True when the schedule buys back (x < 0 somewhere); nothing clamps this.
    bool goes_negative() const { return min_holdings() < 0.0; }
};

namespace detail {

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* who) {
    require(a == b, std::string(who) + ": grid mismatch");
}

inline void require_grid_matches_order(const TimeGrid& grid, const ExecutionOrder& order, const char* who) {
    require(grid.t_end == order.t_end, std::string(who) + ": grid must span [0, T] of the order");
}

}  // namespace detail
}  // namespace ddexec
