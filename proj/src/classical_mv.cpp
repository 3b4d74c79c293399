#include "vtmv/classical_mv.hpp"

#include <cmath>
#include <string>

#include "vtmv/ode.hpp"

namespace vtmv {

namespace {

void check_horizon(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("horizon tau must be a positive finite number, got " + std::to_string(tau));
    }
}

// e^{int_0^tau phi} - 1, guarded against degenerate markets.
double phi_growth_minus_one(const MarketModel& m, double tau) {
    const double phi_int = m.integral_phi(0.0, tau);
    if (!(phi_int > 0.0)) {
        throw AssumptionError("integral of phi is not positive on [0, tau]");
    }
    return std::expm1(phi_int);
}

// x h(tau) - x e^{int r} = x alpha e^{int theta / 2}
double target_excess(const TargetCurve& tc, double tau) {
    if (!(tc.alpha() > 0.0) || !(tc.x() > 0.0)) {
        throw AssumptionError("target must exceed the bond: need x > 0 and h(0) > 1");
    }
    return tc.x() * tc.excess_at(tau);
}

}  // namespace

double mu_of_tau(const MarketModel& m, const TargetCurve& tc, double tau) {
    check_horizon(tau);
    return phi_growth_minus_one(m, tau) / target_excess(tc, tau);
}

ClassicalSolution solve_classical(const MarketModel& m, const TargetCurve& tc, double tau) {
    check_horizon(tau);
    const double excess = target_excess(tc, tau);
    const double growth = phi_growth_minus_one(m, tau);
    const double bond = tc.x() * std::exp(m.integral_r(0.0, tau));

    ClassicalSolution sol;
    sol.market = std::make_shared<const MarketModel>(m);
    sol.x = tc.x();
    sol.tau = tau;
    sol.mu = growth / excess;
    sol.lambda_bar = (growth + 1.0) + sol.mu * bond;
    sol.gamma = (growth + 1.0) / sol.mu + bond;
    sol.frontier_variance = excess * excess / growth;
    sol.target_mean = excess + bond;
    return sol;
}

double frontier_variance(const MarketModel& m, const TargetCurve& tc, double tau) {
    check_horizon(tau);
    const double excess = target_excess(tc, tau);
    return excess * excess / phi_growth_minus_one(m, tau);
}

double log_frontier_variance(const MarketModel& m, const TargetCurve& tc, double tau) {
    check_horizon(tau);
    if (!(tc.alpha() > 0.0) || !(tc.x() > 0.0)) {
        throw AssumptionError("target must exceed the bond: need x > 0 and h(0) > 1");
    }
    const double phi_int = m.integral_phi(0.0, tau);
    if (!(phi_int > 0.0)) throw AssumptionError("integral of phi is not positive on [0, tau]");
    // log(e^P - 1) = P + log(1 - e^{-P})
    const double log_growth = phi_int + std::log(-std::expm1(-phi_int));
    return 2.0 * std::log(tc.x() * tc.alpha()) + tc.integral_theta(0.0, tau) - log_growth;
}

double mean_path(const ClassicalSolution& sol, double t) {
    if (!(t >= 0.0 && t <= sol.tau)) throw DomainError("mean_path: t outside [0, tau]");
    const MarketModel& m = *sol.market;
    const double r_t = m.integral_r(0.0, t);
    const double phi_t = m.integral_phi(0.0, t);
    const double discount = std::exp(-m.integral_r(t, sol.tau));
    return sol.x * std::exp(r_t - phi_t) + sol.gamma * discount * -std::expm1(-phi_t);
}

double second_moment_at_tau(const ClassicalSolution& sol, double step) {
    const MarketModel& m = *sol.market;
    const auto grid = make_time_grid(0.0, sol.tau, step, m.breakpoints());

    // Discount factor e^{-int_a^tau r} at each step start.
    std::vector<double> discount(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) discount[k] = std::exp(-m.integral_r(grid[k], sol.tau));

    std::size_t idx = 0;
    const double gamma_sq = sol.gamma * sol.gamma;
    auto rhs = [&](double t, double y, double a) {
        while (grid[idx] < a) ++idx;
        const Regime& g = m.regime_at(a);
        const double d = discount[idx] * std::exp(g.r * (t - a));
        return (2.0 * g.r - g.phi) * y + gamma_sq * d * d * g.phi;
    };
    return rk4_integrate(grid, sol.x * sol.x, rhs).back();
}

FeedbackStrategy::FeedbackStrategy(const ClassicalSolution& sol)
    : market_(sol.market), tau_(sol.tau), gamma_(sol.gamma) {
    if (!market_) throw StructuralError("feedback strategy: solution has no market");
}

double FeedbackStrategy::neutral_wealth(double t) const {
    if (!(t >= 0.0 && t <= tau_)) throw DomainError("strategy: t outside [0, tau]");
    return gamma_ * std::exp(-market_->integral_r(t, tau_));
}

Eigen::VectorXd FeedbackStrategy::operator()(double t, double wealth) const {
    const double gap = neutral_wealth(t) - wealth;
    return market_->regime_at(t).exposure * gap;
}

Eigen::VectorXd strategy_at(const FeedbackStrategy& fs, double t, double wealth) { return fs(t, wealth); }

double EfficientPayoff::payoff(double w_tau) const {
    return a - scale * std::exp(-sharpe * w_tau - 0.5 * phi * tau);
}

double EfficientPayoff::analytic_mean() const {
    return x * std::exp(r * tau) + std::sqrt(variance * std::expm1(phi * tau));
}

EfficientPayoff efficient_payoff(const MarketModel& m, double x, double tau, double variance) {
    if (m.n() != 1 || m.d() != 1 || !m.is_constant()) {
        throw UnsupportedModelError("efficient_payoff: requires a one-asset constant-coefficient market");
    }
    check_horizon(tau);
    if (!(variance >= 0.0)) throw DomainError("efficient_payoff: variance must be >= 0");
    const Regime& g = m.regimes().front();
    EfficientPayoff p;
    p.x = x;
    p.r = g.r;
    p.tau = tau;
    p.sharpe = g.beta(0) / g.sigma(0, 0);
    p.phi = p.sharpe * p.sharpe;
    p.variance = variance;
    p.scale = std::sqrt(variance / std::expm1(p.phi * tau));
    p.a = x * std::exp(p.r * tau) + std::exp(p.phi * tau) * p.scale;
    p.b = std::exp(p.r * tau) * p.scale;
    return p;
}

}  // namespace vtmv
