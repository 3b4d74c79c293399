#include "vtmv/target.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vtmv {

namespace {
double identity(double v) { return v; }
}  // namespace

TargetCurve::TargetCurve(double x, double alpha, ScalarSchedule theta, ScalarSchedule market_r)
    : x_(x), alpha_(alpha), theta_(std::move(theta)), r_(std::move(market_r)) {
    if (!std::isfinite(x_) || !std::isfinite(alpha_)) {
        throw StructuralError("target: x and alpha must be finite");
    }
    if (theta_.segments() == 0 || r_.segments() == 0) {
        throw StructuralError("target: empty schedule");
    }
}

double TargetCurve::integral_theta(double t0, double t1) const {
    return theta_.integrate(t0, t1, identity);
}

double TargetCurve::excess_at(double t) const {
    return alpha_ * std::exp(0.5 * integral_theta(0.0, t));
}

double TargetCurve::h_at(double t) const {
    if (!(t >= 0.0)) throw DomainError("h_at: time must be >= 0");
    return excess_at(t) + std::exp(r_.integrate(0.0, t, identity));
}

double TargetCurve::h_prime(double t) const {
    if (!(t >= 0.0)) throw DomainError("h_prime: time must be >= 0");
    return 0.5 * theta_.at(t) * excess_at(t) + r_.at(t) * std::exp(r_.integrate(0.0, t, identity));
}

double theta_from_h(const RealFunction& h, const RealFunction& h_prime, const ScalarSchedule& r, double s) {
    const double bond = std::exp(r.integrate(0.0, s, identity));
    const double denom = h(s) - bond;
    if (!(denom > 0.0)) {
        throw AssumptionError("theta_from_h: h(s) <= e^{int r} at s = " + std::to_string(s));
    }
    return 2.0 * (h_prime(s) - r.at(s) * bond) / denom;
}

double approximate_derivative(const RealFunction& f, double s) {
    const double step = 1e-6 * std::max(1.0, s);
    if (s < step) return (f(s + step) - f(s)) / step;
    return (f(s + step) - f(s - step)) / (2.0 * step);
}

TargetConversion target_from_h(double x, const RealFunction& h, const std::optional<RealFunction>& h_prime,
                               const ScalarSchedule& r, std::vector<double> breakpoints) {
    if (breakpoints.empty()) breakpoints.push_back(0.0);
    ValidationReport report;
    RealFunction derivative;
    if (h_prime) {
        derivative = *h_prime;
    } else {
        derivative = [&h](double s) { return approximate_derivative(h, s); };
        report.derivative_approximated = true;
        report.notes.emplace_back("h' approximated by central differences");
    }
    std::vector<double> thetas;
    thetas.reserve(breakpoints.size());
    for (std::size_t k = 0; k < breakpoints.size(); ++k) {
        const double mid = k + 1 < breakpoints.size() ? 0.5 * (breakpoints[k] + breakpoints[k + 1])
                                                      : breakpoints[k] + 1.0;
        thetas.push_back(theta_from_h(h, derivative, r, mid));
    }
    TargetCurve curve(x, h(0.0) - 1.0, ScalarSchedule(std::move(breakpoints), std::move(thetas)), r);
    report.merge(validate_target(curve));
    return {std::move(curve), std::move(report)};
}

ValidationReport validate_target(const TargetCurve& tc) {
    ValidationReport report;
    if (!(tc.x() > 0.0)) {
        report.violations.push_back({ViolationKind::NonPositiveWealth, 0, "x <= 0"});
    }
    if (!(tc.alpha() > 0.0)) {
        report.violations.push_back({ViolationKind::TargetNotAboveBond, 0, "h(0) <= 1 (alpha <= 0)"});
    }
    const auto thetas = tc.theta().values();
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        if (!(thetas[k] > 0.0)) {
            report.violations.push_back(
                {ViolationKind::NonPositiveThetaRate, k, "theta <= 0 on segment " + std::to_string(k)});
        }
    }
    return report;
}

}  // namespace vtmv
