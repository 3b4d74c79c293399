#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's solver paths; formulas are written out directly for
// constant-coefficient markets.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Constant-coefficient model reduced to scalars.
struct ConstantModel {
    double r;
    double phi;
    double x;
    double alpha;
    double theta;
};

inline double h(const ConstantModel& c, double t) {
    return c.alpha * std::exp(0.5 * c.theta * t) + std::exp(c.r * t);
}

inline double variance(const ConstantModel& c, double tau) {
    return c.x * c.x * c.alpha * c.alpha * std::exp(c.theta * tau) / (std::exp(c.phi * tau) - 1.0);
}

inline double gamma(const ConstantModel& c, double tau) {
    const double mu = (std::exp(c.phi * tau) - 1.0) / (c.x * h(c, tau) - c.x * std::exp(c.r * tau));
    return std::exp(c.phi * tau) / mu + c.x * std::exp(c.r * tau);
}

/// Plain RK4 of dE/dt = (r - phi) E + phi gamma e^{-r (tau - t)} with n uniform steps.
inline std::vector<double> mean_ode(const ConstantModel& c, double tau, std::size_t n) {
    const double g = gamma(c, tau);
    auto f = [&](double t, double y) { return (c.r - c.phi) * y + c.phi * g * std::exp(-c.r * (tau - t)); };
    std::vector<double> out{c.x};
    const double h_step = tau / static_cast<double>(n);
    double y = c.x;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = h_step * static_cast<double>(k);
        const double k1 = f(t, y);
        const double k2 = f(t + h_step / 2, y + h_step / 2 * k1);
        const double k3 = f(t + h_step / 2, y + h_step / 2 * k2);
        const double k4 = f(t + h_step, y + h_step * k3);
        y += h_step / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        out.push_back(y);
    }
    return out;
}

/// Brute-force minimizer of f over a uniform grid on [lo, hi].
inline double argmin_on_grid(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
    double best_t = lo;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
        const double v = f(t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    return best_t;
}

/// Central finite difference.
inline double derivative(const std::function<double(double)>& f, double t, double h = 1e-5) {
    return (f(t + h) - f(t - h)) / (2 * h);
}

}  // namespace oracle
