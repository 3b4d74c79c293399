#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vtmv/market.hpp"
#include "vtmv/run_spec.hpp"
#include "vtmv/target.hpp"
#include "vtmv/terminal_time.hpp"

namespace vtmv {

/// Numeric table with optional cells; empty cells mark "no value" (e.g. no
/// finite optimal horizon).
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const;
};

/// Ten significant digits per cell, empty string for missing cells.
void write_csv(std::ostream& out, const Table& table);

[[nodiscard]] std::vector<double> linspace(double lo, double hi, std::size_t points);

/// `tau,variance,mean_target` at each tau.
[[nodiscard]] Table frontier_table(const MarketModel& m, const TargetCurve& tc, std::span<const double> taus);

/// Variance against horizon for alpha = 0.5 and 0.3:
/// `tau,var_alpha05,var_alpha03`.
[[nodiscard]] Table figure1(const MarketModel& m, const TargetCurve& tc, const FrontierGrid& grid = {});

/// Classical variance at tau = 1.2 and 2.4 against the variance at tau*,
/// as functions of theta/2 in [0.05, 0.55]:
/// `theta_half,var_tau12,var_tau24,var_taustar`.
[[nodiscard]] Table figure2(const MarketModel& m, const TargetCurve& tc, const ScanOptions& scan = {},
                            std::size_t points = 101);

/// `theta_half,tau_star` over theta/2 in [0.05, 0.55].
[[nodiscard]] Table figure3(const MarketModel& m, const TargetCurve& tc, const ScanOptions& scan = {},
                            std::size_t points = 101);

/// `n,tau_star` for n = 1..n_max copies of the first asset; the target's
/// theta must be constant.
[[nodiscard]] Table figure4(const MarketModel& m, const TargetCurve& tc, std::size_t n_max = 6);

}  // namespace vtmv
