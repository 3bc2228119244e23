#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ddexec {

/// Pairwise summation; the result depends only on the input order, never on
/// how the values were produced, so serial and threaded reductions agree.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Trapezoid rule on a uniform grid with spacing dt.
template <class F>
double trapezoid(std::size_t n_steps, double dt, F&& integrand) {
    double interior = 0.0;
    for (std::size_t i = 1; i < n_steps; ++i) interior += integrand(i);
    return dt * (interior + 0.5 * (integrand(0) + integrand(n_steps)));
}

inline double trapezoid(std::span<const double> f, double dt) {
    return trapezoid(f.size() - 1, dt, [&](std::size_t i) { return f[i]; });
}

/// Running trapezoid integral: out[i] = integral of f from t_0 to t_i.
inline std::vector<double> cumulative_trapezoid(std::span<const double> f, double dt) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
    return out;
}

}  // namespace ddexec
