#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vtmv/errors.hpp"
#include "vtmv/market.hpp"
#include "vtmv/schedule.hpp"

namespace vtmv {

/// Moving mean target x h(t) stored in excess-return form
///
///     h(t) = alpha e^{int_0^t theta/2} + e^{int_0^t r},   alpha = h(0) - 1.
///
/// theta/2 is the growth rate of the target's excess over the bond.
class TargetCurve {
public:
    TargetCurve(double x, double alpha, ScalarSchedule theta, ScalarSchedule market_r);
    TargetCurve(double x, double alpha, ScalarSchedule theta, const MarketModel& market)
        : TargetCurve(x, alpha, std::move(theta), market.r()) {}

    [[nodiscard]] double x() const noexcept { return x_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] const ScalarSchedule& theta() const noexcept { return theta_; }
    [[nodiscard]] const ScalarSchedule& market_r() const noexcept { return r_; }

    [[nodiscard]] double theta_at(double t) const { return theta_.at(t); }
    [[nodiscard]] double integral_theta(double t0, double t1) const;

    [[nodiscard]] double h_at(double t) const;
    /// Right derivative of h (theta and r are right-continuous).
    [[nodiscard]] double h_prime(double t) const;
    /// alpha e^{int_0^t theta/2}: the excess of h over the bond factor.
    [[nodiscard]] double excess_at(double t) const;
    /// Target wealth x h(t).
    [[nodiscard]] double wealth_at(double t) const { return x_ * h_at(t); }
    /// h'(t)/h(t); diagnostics only.
    [[nodiscard]] double log_growth_rate(double t) const { return h_prime(t) / h_at(t); }

private:
    double x_;
    double alpha_;
    ScalarSchedule theta_;
    ScalarSchedule r_;
};

using RealFunction = std::function<double(double)>;

/// Recovers the excess-return rate from a raw target function:
/// theta(s) = 2 (h'(s) - r(s) e^{int r}) / (h(s) - e^{int r}).
/// Throws AssumptionError when h(s) does not exceed the bond factor.
[[nodiscard]] double theta_from_h(const RealFunction& h, const RealFunction& h_prime,
                                  const ScalarSchedule& r, double s);

/// Central difference with step 1e-6 max(1, s) (one-sided at s = 0).
[[nodiscard]] double approximate_derivative(const RealFunction& f, double s);

struct TargetConversion {
    TargetCurve curve;
    ValidationReport report;
};

/// Builds a piecewise-constant theta on `breakpoints` by evaluating
/// theta_from_h at each segment midpoint (the last segment at start + 1).
/// Without `h_prime` the derivative is approximated and flagged in the report.
[[nodiscard]] TargetConversion target_from_h(double x, const RealFunction& h,
                                             const std::optional<RealFunction>& h_prime,
                                             const ScalarSchedule& r, std::vector<double> breakpoints);

[[nodiscard]] ValidationReport validate_target(const TargetCurve& tc);

}  // namespace vtmv
