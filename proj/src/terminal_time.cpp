#include "vtmv/terminal_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vtmv/classical_mv.hpp"

namespace vtmv {

namespace {

std::size_t grid_count(double horizon, double grid) {
    if (!(horizon > 0.0)) throw DomainError("scan: horizon must be > 0");
    if (!(grid > 0.0)) throw DomainError("scan: grid step must be > 0");
    return static_cast<std::size_t>(std::floor(horizon / grid + 1e-9));
}

double scan_point(std::size_t k, double grid, double horizon) {
    return std::min(static_cast<double>(k) * grid, horizon);
}

}  // namespace

std::string_view to_string(TerminalCase c) noexcept {
    switch (c) {
        case TerminalCase::FiniteOptimum: return "FiniteOptimum";
        case TerminalCase::InfimumAtInfinity: return "InfimumAtInfinity";
        case TerminalCase::ConstantTargetRiskless: return "ConstantTargetRiskless";
        case TerminalCase::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

double objective_I(const MarketModel& m, const TargetCurve& tc, double tau) {
    if (!(tau >= 0.0)) throw DomainError("objective_I: tau must be >= 0");
    const double theta = tc.theta_at(tau);
    const double phi = m.phi_at(tau);
    return (theta - phi) * std::exp(m.integral_phi(0.0, tau)) - theta;
}

Classification classify_case(const MarketModel& m, const TargetCurve& tc, double horizon, double grid) {
    const std::size_t count = grid_count(horizon, grid);
    std::vector<double> points(tc.theta().breakpoints().begin(), tc.theta().breakpoints().end());
    points.insert(points.end(), m.breakpoints().begin(), m.breakpoints().end());

    Classification out;
    out.delta_margin = std::numeric_limits<double>::infinity();
    out.max_margin = -std::numeric_limits<double>::infinity();
    auto visit = [&](double s) {
        const double margin = tc.theta_at(s) - m.phi_at(s);
        out.delta_margin = std::min(out.delta_margin, margin);
        out.max_margin = std::max(out.max_margin, margin);
    };
    for (std::size_t k = 0; k <= count; ++k) visit(scan_point(k, grid, horizon));
    for (double s : points) {
        if (s <= horizon) visit(s);
    }

    if (out.delta_margin > 0.0) {
        out.kind = TerminalCase::FiniteOptimum;
    } else if (out.max_margin <= 0.0) {
        out.kind = TerminalCase::InfimumAtInfinity;
    } else {
        out.kind = TerminalCase::Unclassified;
    }
    return out;
}

std::optional<double> constant_kappa(const MarketModel& m, const TargetCurve& tc) {
    if (!m.is_constant() || !tc.theta().is_constant()) return std::nullopt;
    return tc.theta_at(0.0) / m.phi_at(0.0);
}

TerminalTimeSolution smallest_root(const MarketModel& m, const TargetCurve& tc, const ScanOptions& opts) {
    const Classification cls = classify_case(m, tc, opts.horizon, opts.grid);
    if (cls.kind != TerminalCase::FiniteOptimum) {
        throw PreconditionError("smallest_root: model is " + std::string(to_string(cls.kind)) +
                                ", not FiniteOptimum");
    }
    if (!(opts.tol > 0.0)) throw DomainError("smallest_root: tol must be > 0");

    const std::size_t count = grid_count(opts.horizon, opts.grid);
    double lo = 0.0;
    double hi = 0.0;
    bool found = false;
    double lo_val = objective_I(m, tc, 0.0);
    for (std::size_t k = 1; k <= count; ++k) {
        const double t = scan_point(k, opts.grid, opts.horizon);
        const double val = objective_I(m, tc, t);
        if (lo_val < 0.0 && val >= 0.0) {
            hi = t;
            found = true;
            break;
        }
        lo = t;
        lo_val = val;
    }
    if (!found) {
        throw HorizonExceededError("smallest_root: no sign change of I within horizon " +
                                   std::to_string(opts.horizon));
    }

    double root = hi;
    if (objective_I(m, tc, hi) != 0.0) {
        for (int iter = 0; iter < 200 && hi - lo >= opts.tol; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double val = objective_I(m, tc, mid);
            if (val == 0.0) {
                lo = hi = mid;
                break;
            }
            (val < 0.0 ? lo : hi) = mid;
        }
        root = 0.5 * (lo + hi);
    }

    TerminalTimeSolution sol;
    sol.kind = TerminalCase::FiniteOptimum;
    sol.delta_margin = cls.delta_margin;
    sol.tau_star = root;
    sol.bracket = std::make_pair(lo, hi);
    sol.var_star = frontier_variance(m, tc, root);
    sol.kappa = constant_kappa(m, tc);

    const double log_star = log_frontier_variance(m, tc, root);
    double min_log = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= count; ++k) {
        min_log = std::min(min_log, log_frontier_variance(m, tc, scan_point(k, opts.grid, opts.horizon)));
    }
    sol.global_minimum_on_grid = log_star <= min_log + 1e-12;
    return sol;
}

TerminalTimeSolution solve_terminal_time(const MarketModel& m, const TargetCurve& tc, const ScanOptions& opts) {
    const Classification cls = classify_case(m, tc, opts.horizon, opts.grid);
    if (cls.kind == TerminalCase::FiniteOptimum) return smallest_root(m, tc, opts);

    const std::size_t count = grid_count(opts.horizon, opts.grid);
    TerminalTimeSolution sol;
    sol.kind = cls.kind;
    sol.delta_margin = cls.delta_margin;
    sol.kappa = constant_kappa(m, tc);

    if (cls.kind == TerminalCase::InfimumAtInfinity) {
        bool decreasing = true;
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k <= count; ++k) {
            const double v = log_frontier_variance(m, tc, scan_point(k, opts.grid, opts.horizon));
            if (!(v < prev)) decreasing = false;
            prev = v;
        }
        sol.monotone_decreasing = decreasing;
        sol.horizon_variance = std::exp(prev);
        // Limit as tau -> infinity is governed by the last segment of theta and phi.
        const double last = std::max(tc.theta().breakpoints().back(), m.breakpoints().back());
        const double theta_last = tc.theta_at(last);
        const double phi_last = m.phi_at(last);
        if (theta_last < phi_last) {
            sol.var_star = 0.0;
        } else {
            const double x_alpha = tc.x() * tc.alpha();
            sol.var_star = x_alpha * x_alpha * std::exp(tc.integral_theta(0.0, last) - m.integral_phi(0.0, last));
        }
        return sol;
    }

    // Unclassified: report the grid minimizer, flagged.
    double best_tau = scan_point(1, opts.grid, opts.horizon);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= count; ++k) {
        const double t = scan_point(k, opts.grid, opts.horizon);
        const double v = log_frontier_variance(m, tc, t);
        if (v < best) {
            best = v;
            best_tau = t;
        }
    }
    sol.tau_star = best_tau;
    sol.var_star = std::exp(best);
    sol.global_minimum_on_grid = true;
    sol.outside_hypotheses = true;
    return sol;
}

double tau_star_constant(double theta, double phi) {
    if (!(phi > 0.0)) throw DomainError("tau_star_constant: phi must be > 0");
    if (!(theta > phi)) throw PreconditionError("tau_star_constant: theta <= phi, no finite optimum");
    return -std::log1p(-phi / theta) / phi;
}

double var_star_constant(double x, double alpha, double theta, double phi) {
    if (!(x > 0.0) || !(alpha > 0.0)) throw DomainError("var_star_constant: x and alpha must be > 0");
    if (!(phi > 0.0)) throw DomainError("var_star_constant: phi must be > 0");
    const double kappa = theta / phi;
    if (!(kappa > 1.0)) throw PreconditionError("var_star_constant: kappa <= 1, no finite optimum");
    return x * x * alpha * alpha * kappa * std::pow(kappa / (kappa - 1.0), kappa - 1.0);
}

TerminalTimeSolution constant_target_time(double x, double level, const MarketModel& m) {
    if (!(x > 0.0)) throw DomainError("constant_target_time: x must be > 0");
    TerminalTimeSolution sol;
    sol.kind = TerminalCase::ConstantTargetRiskless;
    sol.var_star = 0.0;
    if (level <= x) {
        sol.tau_star = 0.0;
        sol.target_already_met = true;
        return sol;
    }
    // Walk the r segments until the accumulated log-growth reaches ln(L/x).
    const double needed = std::log(level / x);
    const auto bps = m.r().breakpoints();
    const auto rates = m.r().values();
    double acc = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k) {
        const double start = bps[k];
        const bool last = k + 1 == rates.size();
        const double len = last ? std::numeric_limits<double>::infinity() : bps[k + 1] - start;
        if (rates[k] > 0.0 && acc + rates[k] * len >= needed) {
            sol.tau_star = start + (needed - acc) / rates[k];
            return sol;
        }
        if (!last) acc += rates[k] * len;
    }
    throw HorizonExceededError("constant_target_time: the bond never reaches the target level");
}

std::vector<AssetCountPoint> tau_star_vs_assets(double r, double b, double sigma, double theta,
                                                std::size_t n_max) {
    if (n_max < 1) throw DomainError("tau_star_vs_assets: n_max must be >= 1");
    std::vector<AssetCountPoint> out;
    out.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const MarketModel m = MarketModel::identical_assets(n, r, b, sigma);
        AssetCountPoint p;
        p.n = n;
        p.phi = m.phi_at(0.0);
        if (theta > p.phi) p.tau_star = tau_star_constant(theta, p.phi);
        out.push_back(p);
    }
    return out;
}

}  // namespace vtmv
