#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "vtmv/errors.hpp"

namespace vtmv {

/// Time grid from t0 to t1 with uniform spacing of at most `step`, with every
/// breakpoint strictly inside (t0, t1) inserted so that piecewise-constant
/// coefficients are constant on each step.
inline std::vector<double> make_time_grid(double t0, double t1, double step,
                                          std::span<const double> breakpoints) {
    if (!(step > 0.0)) throw DomainError("time grid: step must be > 0");
    if (!(t1 >= t0)) throw DomainError("time grid: t1 < t0");
    std::vector<double> grid;
    const double span = t1 - t0;
    const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(span / step - 1e-9)));
    grid.reserve(count + 1 + breakpoints.size());
    std::size_t b = 0;
    while (b < breakpoints.size() && breakpoints[b] <= t0) ++b;
    grid.push_back(t0);
    for (std::size_t k = 1; k <= count; ++k) {
        const double t = k == count ? t1 : t0 + span * static_cast<double>(k) / static_cast<double>(count);
        while (b < breakpoints.size() && breakpoints[b] < t) {
            if (breakpoints[b] > grid.back()) grid.push_back(breakpoints[b]);
            ++b;
        }
        if (t > grid.back()) grid.push_back(t);
    }
    return grid;
}

/// Classical fourth-order Runge-Kutta over a prescribed grid for a scalar ODE
/// y' = f(t, y, left), where `left` is the start of the current step. Passing
/// the step start lets f pick coefficients that are constant on the step even
/// when the stage time equals the next breakpoint.
template <typename F>
std::vector<double> rk4_integrate(std::span<const double> grid, double y0, F&& f) {
    std::vector<double> ys;
    ys.reserve(grid.size());
    ys.push_back(y0);
    double y = y0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double a = grid[k];
        const double h = grid[k + 1] - a;
        const double k1 = f(a, y, a);
        const double k2 = f(a + 0.5 * h, y + 0.5 * h * k1, a);
        const double k3 = f(a + 0.5 * h, y + 0.5 * h * k2, a);
        const double k4 = f(a + h, y + h * k3, a);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ys.push_back(y);
    }
    return ys;
}

}  // namespace vtmv
