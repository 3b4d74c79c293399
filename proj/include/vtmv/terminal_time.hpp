#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "vtmv/market.hpp"
#include "vtmv/target.hpp"

namespace vtmv {

enum class TerminalCase {
    FiniteOptimum,           // theta > phi + delta everywhere: a finite tau* exists
    InfimumAtInfinity,       // theta <= phi everywhere: variance decreases forever
    ConstantTargetRiskless,  // constant target reached by the bond alone
    Unclassified,            // theta - phi changes sign; outside the model's hypotheses
};

[[nodiscard]] std::string_view to_string(TerminalCase c) noexcept;

struct ScanOptions {
    double horizon = 100.0;
    double grid = 1e-3;
    double tol = 1e-10;
};

struct Classification {
    TerminalCase kind = TerminalCase::Unclassified;
    double delta_margin = 0.0;  // min of theta - phi over the scan points
    double max_margin = 0.0;
};

struct TerminalTimeSolution {
    TerminalCase kind = TerminalCase::Unclassified;
    std::optional<double> tau_star;
    std::optional<double> var_star;
    std::optional<double> kappa;
    double delta_margin = 0.0;
    /// Final bisection bracket around the root.
    std::optional<std::pair<double, double>> bracket;
    /// var_star is no larger than the variance at every scan point.
    bool global_minimum_on_grid = false;
    /// Case (ii): variance strictly decreasing over the scan grid.
    bool monotone_decreasing = false;
    /// Variance at the scan horizon (case (ii) reports this instead of a minimum).
    std::optional<double> horizon_variance;
    bool outside_hypotheses = false;
    bool target_already_met = false;
};

/// I(tau) = (theta(tau) - phi(tau)) e^{int_0^tau phi} - theta(tau); has the
/// sign of d Var / d tau.
[[nodiscard]] double objective_I(const MarketModel& m, const TargetCurve& tc, double tau);

/// Compares theta and phi on the grid 0, grid, 2 grid, ..., horizon together
/// with every coefficient breakpoint below the horizon.
[[nodiscard]] Classification classify_case(const MarketModel& m, const TargetCurve& tc, double horizon,
                                           double grid);

/// First sign change of I on [grid, horizon], refined by bisection until the
/// bracket is narrower than tol. Requires a FiniteOptimum classification.
[[nodiscard]] TerminalTimeSolution smallest_root(const MarketModel& m, const TargetCurve& tc,
                                                 const ScanOptions& opts = {});

/// Classifies, then dispatches: root search for case (i), horizon-truncated
/// report for case (ii), grid minimizer (flagged) when unclassified.
[[nodiscard]] TerminalTimeSolution solve_terminal_time(const MarketModel& m, const TargetCurve& tc,
                                                       const ScanOptions& opts = {});

/// theta / phi when both are constant.
[[nodiscard]] std::optional<double> constant_kappa(const MarketModel& m, const TargetCurve& tc);

/// (1/phi) ln(theta / (theta - phi)).
[[nodiscard]] double tau_star_constant(double theta, double phi);

/// x^2 alpha^2 kappa (kappa / (kappa - 1))^{kappa - 1},  kappa = theta / phi.
[[nodiscard]] double var_star_constant(double x, double alpha, double theta, double phi);

/// Constant target L: smallest tau with x e^{int_0^tau r} = L; zero variance.
[[nodiscard]] TerminalTimeSolution constant_target_time(double x, double level, const MarketModel& m);

struct AssetCountPoint {
    std::size_t n = 0;
    double phi = 0.0;
    std::optional<double> tau_star;  // empty when theta <= phi_n
};

/// tau* for n = 1..n_max identical independent assets.
[[nodiscard]] std::vector<AssetCountPoint> tau_star_vs_assets(double r, double b, double sigma, double theta,
                                                              std::size_t n_max);

}  // namespace vtmv
