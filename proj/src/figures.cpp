#include "vtmv/figures.hpp"

#include <algorithm>
#include <ostream>

#include "vtmv/classical_mv.hpp"
#include "vtmv/csv.hpp"

namespace vtmv {

namespace {

constexpr double kThetaHalfMin = 0.05;
constexpr double kThetaHalfMax = 0.55;

TargetCurve with_theta(const TargetCurve& tc, double theta) {
    return TargetCurve(tc.x(), tc.alpha(), ScalarSchedule(theta), tc.market_r());
}

TargetCurve with_alpha(const TargetCurve& tc, double alpha) {
    return TargetCurve(tc.x(), alpha, tc.theta(), tc.market_r());
}

std::optional<double> optimal_field(const MarketModel& m, const TargetCurve& tc, const ScanOptions& scan,
                                    bool want_variance) {
    const TerminalTimeSolution sol = solve_terminal_time(m, tc, scan);
    if (sol.kind != TerminalCase::FiniteOptimum) return std::nullopt;
    return want_variance ? sol.var_star : sol.tau_star;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw StructuralError("table: no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            if (row[c]) out << format_number(*row[c]);
        }
        out << '\n';
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    if (points == 0) return {};
    if (points == 1) return {lo};
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    out.back() = hi;
    return out;
}

Table frontier_table(const MarketModel& m, const TargetCurve& tc, std::span<const double> taus) {
    Table t{{"tau", "variance", "mean_target"}, {}};
    for (double tau : taus) t.rows.push_back({tau, frontier_variance(m, tc, tau), tc.wealth_at(tau)});
    return t;
}

Table figure1(const MarketModel& m, const TargetCurve& tc, const FrontierGrid& grid) {
    const TargetCurve high = with_alpha(tc, 0.5);
    const TargetCurve low = with_alpha(tc, 0.3);
    Table t{{"tau", "var_alpha05", "var_alpha03"}, {}};
    for (double tau : linspace(grid.tau_min, grid.tau_max, grid.points)) {
        t.rows.push_back({tau, frontier_variance(m, high, tau), frontier_variance(m, low, tau)});
    }
    return t;
}

Table figure2(const MarketModel& m, const TargetCurve& tc, const ScanOptions& scan, std::size_t points) {
    Table t{{"theta_half", "var_tau12", "var_tau24", "var_taustar"}, {}};
    for (double half : linspace(kThetaHalfMin, kThetaHalfMax, points)) {
        const TargetCurve curve = with_theta(tc, 2.0 * half);
        t.rows.push_back({half, frontier_variance(m, curve, 1.2), frontier_variance(m, curve, 2.4),
                          optimal_field(m, curve, scan, true)});
    }
    return t;
}

Table figure3(const MarketModel& m, const TargetCurve& tc, const ScanOptions& scan, std::size_t points) {
    Table t{{"theta_half", "tau_star"}, {}};
    for (double half : linspace(kThetaHalfMin, kThetaHalfMax, points)) {
        t.rows.push_back({half, optimal_field(m, with_theta(tc, 2.0 * half), scan, false)});
    }
    return t;
}

Table figure4(const MarketModel& m, const TargetCurve& tc, std::size_t n_max) {
    if (!m.is_constant() || !tc.theta().is_constant()) {
        throw UnsupportedModelError("figure 4 requires constant coefficients and a constant theta");
    }
    const Regime& g = m.regimes().front();
    Table t{{"n", "tau_star"}, {}};
    for (const auto& p : tau_star_vs_assets(g.r, g.r + g.beta(0), g.sigma(0, 0), tc.theta_at(0.0), n_max)) {
        t.rows.push_back({static_cast<double>(p.n), p.tau_star});
    }
    return t;
}

}  // namespace vtmv
