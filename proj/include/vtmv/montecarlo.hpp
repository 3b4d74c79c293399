#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vtmv/classical_mv.hpp"
#include "vtmv/market.hpp"
#include "vtmv/target.hpp"

namespace vtmv {

struct SimulationConfig {
    std::size_t paths = 100000;
    double step = 1e-3;
    std::uint64_t seed = 1;
    bool antithetic = false;
    /// 0 = hardware concurrency. VTMV_THREADS caps either choice.
    std::size_t threads = 0;
    /// Keep the cross-sectional mean at every grid time.
    bool record_mean_path = false;
    /// When set (and the mean path is recorded), the first grid time where the
    /// sample mean reaches this level is reported.
    std::optional<double> target_level;
    /// Keep full trajectories of the first `dump_paths` paths.
    std::size_t dump_paths = 0;
};

struct PathPoint {
    std::size_t path = 0;
    double t = 0.0;
    double wealth = 0.0;
};

struct SimulationResult {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double se_mean = 0.0;
    double se_variance = 0.0;
    std::size_t paths_used = 0;
    std::size_t flagged_paths = 0;
    std::optional<double> stopping_time_estimate;
    std::vector<double> time_grid;
    std::vector<double> mean_path;
    std::vector<PathPoint> dump;
    std::vector<std::string> warnings;
};

/// User-supplied rule: capital held in each risky asset given (t, wealth).
using StrategyRule = std::function<Eigen::VectorXd(double t, double wealth)>;

/// Euler-Maruyama for dX = [r X + beta pi^T] dt + pi sigma dW with d
/// independent Gaussian increments per step, under the optimal feedback rule.
/// The bond part r X is advanced with the exact factor e^{r dt}.
[[nodiscard]] SimulationResult simulate_wealth(const MarketModel& m, const FeedbackStrategy& strategy, double x,
                                               const SimulationConfig& cfg);

/// Same scheme under an arbitrary rule. Paths whose wealth becomes non-finite
/// are excluded and counted; more than 0.1% of them fails the run.
[[nodiscard]] SimulationResult simulate_wealth(const MarketModel& m, const StrategyRule& rule, double x,
                                               double tau, const SimulationConfig& cfg);

enum class StoppingMode { Ode, MonteCarlo };

/// inf{t <= tau : E[X(t)] >= x h(tau)} for the deterministic mean path.
/// Ode mode integrates dE = [r E + beta pi(t, E)^T] dt with RK4, which is
/// exact in expectation for rules affine in wealth. Empty when not reached.
[[nodiscard]] std::optional<double> estimate_stopping_time(const MarketModel& m, const TargetCurve& tc,
                                                           const StrategyRule& rule, double tau,
                                                           StoppingMode mode, const SimulationConfig& cfg);
[[nodiscard]] std::optional<double> estimate_stopping_time(const MarketModel& m, const TargetCurve& tc,
                                                           const FeedbackStrategy& strategy, StoppingMode mode,
                                                           const SimulationConfig& cfg);

/// Draws W(tau) ~ N(0, tau) and evaluates the closed-form efficient payoff.
[[nodiscard]] SimulationResult simulate_payoff(const EfficientPayoff& payoff, const SimulationConfig& cfg);

/// CSV with header `path,t,wealth`.
void write_path_dump(std::ostream& out, const std::vector<PathPoint>& dump);

[[nodiscard]] std::size_t resolve_thread_count(std::size_t requested);

}  // namespace vtmv
