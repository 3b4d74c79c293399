#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "vtmv/market.hpp"
#include "vtmv/target.hpp"

namespace vtmv {

/// Optimum of the fixed-horizon mean-variance problem whose mean is pinned to
/// the target x h(tau).
struct ClassicalSolution {
    std::shared_ptr<const MarketModel> market;
    double x = 0.0;
    double tau = 0.0;
    double mu = 0.0;          // risk-aversion weight of the embedded problem
    double lambda_bar = 0.0;  // e^{int phi} + mu x e^{int r}
    double gamma = 0.0;       // lambda_bar / mu
    double frontier_variance = 0.0;
    double target_mean = 0.0;  // x h(tau)
};

/// mu(tau) = (e^{int_0^tau phi} - 1) / (x h(tau) - x e^{int_0^tau r}).
[[nodiscard]] double mu_of_tau(const MarketModel& m, const TargetCurve& tc, double tau);

[[nodiscard]] ClassicalSolution solve_classical(const MarketModel& m, const TargetCurve& tc, double tau);

/// Minimal variance at horizon tau: x^2 alpha^2 e^{int theta} / (e^{int phi} - 1).
[[nodiscard]] double frontier_variance(const MarketModel& m, const TargetCurve& tc, double tau);

/// log of frontier_variance; finite where the variance itself would overflow.
[[nodiscard]] double log_frontier_variance(const MarketModel& m, const TargetCurve& tc, double tau);

/// Closed-form E[X(t)] under the optimal feedback rule, 0 <= t <= tau.
[[nodiscard]] double mean_path(const ClassicalSolution& sol, double t);

/// E[X(tau)^2] from its linear ODE, RK4 with steps of at most `step`
/// (subdivided at coefficient breakpoints).
[[nodiscard]] double second_moment_at_tau(const ClassicalSolution& sol, double step = 1e-3);

/// pi(t, X) = [sigma sigma^T]^{-1} beta^T (gamma e^{-int_t^tau r} - X).
class FeedbackStrategy {
public:
    explicit FeedbackStrategy(const ClassicalSolution& sol);

    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] const MarketModel& market() const noexcept { return *market_; }

    /// gamma e^{-int_t^tau r}: the wealth level at which the rule holds no stock.
    [[nodiscard]] double neutral_wealth(double t) const;

    [[nodiscard]] Eigen::VectorXd operator()(double t, double wealth) const;

private:
    std::shared_ptr<const MarketModel> market_;
    double tau_;
    double gamma_;
};

[[nodiscard]] Eigen::VectorXd strategy_at(const FeedbackStrategy& fs, double t, double wealth);

/// Terminal wealth of the efficient strategy in the one-dimensional constant
/// market as an explicit function of W(tau):
///
///     X(tau) = a - scale * e^{-s W(tau) - phi tau / 2},   s = (b - r) / sigma,  phi = s^2.
struct EfficientPayoff {
    double x = 0.0;
    double r = 0.0;
    double tau = 0.0;
    double sharpe = 0.0;
    double phi = 0.0;
    double variance = 0.0;
    double scale = 0.0;  // sqrt(Var / (e^{phi tau} - 1))
    double a = 0.0;
    double b = 0.0;

    [[nodiscard]] double payoff(double w_tau) const;
    [[nodiscard]] double analytic_mean() const;
};

/// Throws UnsupportedModelError unless n = d = 1 with constant coefficients.
[[nodiscard]] EfficientPayoff efficient_payoff(const MarketModel& m, double x, double tau, double variance);

}  // namespace vtmv
