#include "vtmv/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "vtmv/csv.hpp"
#include "vtmv/ode.hpp"
#include "vtmv/rng.hpp"

namespace vtmv {

namespace {

// Fixed block size: the reduction order depends on it, never on the thread count.
constexpr std::size_t kBlock = 4096;
constexpr double kMaxFlaggedFraction = 1e-3;
constexpr double kCrossingTolerance = 1e-10;

void check_config(const SimulationConfig& cfg, double tau) {
    if (cfg.paths < 2) throw DomainError("simulation: paths must be >= 2");
    if (!(cfg.step > 0.0)) throw DomainError("simulation: step must be > 0");
    if (!(tau > 0.0)) throw DomainError("simulation: tau must be > 0");
    if (cfg.step > tau) throw DomainError("simulation: step exceeds tau");
}

template <typename Body>
void parallel_blocks(std::size_t blocks, std::size_t requested_threads, Body&& body) {
    const std::size_t threads = std::min(resolve_thread_count(requested_threads), blocks);
    if (threads <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) body(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < blocks; b = next++) {
                try {
                    body(b);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = blocks;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
};

Moments sample_moments(const std::vector<double>& values, const std::vector<char>& flagged, bool antithetic) {
    // Sums are taken relative to the first finite value, so identical samples
    // give a mean equal to that value and a variance of exactly zero.
    std::size_t used = 0;
    double shift = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (flagged[i]) continue;
        if (used == 0) shift = values[i];
        sum += values[i] - shift;
        ++used;
    }
    if (used < 2) throw NumericError("simulation: fewer than two finite paths");
    const auto n = static_cast<double>(used);
    const double offset = sum / n;
    Moments out;
    out.mean = shift + offset;
    double m2 = 0.0;
    double m4 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (flagged[i]) continue;
        const double dev = (values[i] - shift) - offset;
        const double sq = dev * dev;
        m2 += sq;
        m4 += sq * sq;
    }
    out.variance = m2 / (n - 1.0);
    out.se_mean = std::sqrt(out.variance / n);
    // Standard error of the unbiased sample variance from the fourth central moment.
    const double var_of_var = (m4 / n - out.variance * out.variance * (n - 3.0) / (n - 1.0)) / n;
    out.se_variance = std::sqrt(std::max(0.0, var_of_var));

    if (antithetic) {
        // Antithetic partners are dependent: the mean's error comes from pair averages.
        std::vector<double> pairs;
        pairs.reserve(values.size() / 2);
        for (std::size_t i = 0; i + 1 < values.size(); i += 2) {
            if (!flagged[i] && !flagged[i + 1]) pairs.push_back(0.5 * ((values[i] - shift) + (values[i + 1] - shift)));
        }
        if (pairs.size() >= 2) {
            double psum = 0.0;
            for (double v : pairs) psum += v;
            const double pmean = psum / static_cast<double>(pairs.size());
            double pss = 0.0;
            for (double v : pairs) pss += (v - pmean) * (v - pmean);
            const double pvar = pss / static_cast<double>(pairs.size() - 1);
            out.se_mean = std::sqrt(pvar / static_cast<double>(pairs.size()));
        }
    }
    return out;
}

std::optional<double> first_crossing(const std::vector<double>& grid, const std::vector<double>& values,
                                     double level) {
    const double threshold = level - kCrossingTolerance * std::abs(level);
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] >= threshold) return grid[k];
    }
    return std::nullopt;
}

// Advance(k, X, z) -> X after step k given standard normals z[0..dims).
template <typename Advance>
SimulationResult run_engine(const std::vector<double>& grid, std::size_t dims, double x,
                            const SimulationConfig& cfg, Advance&& advance) {
    const std::size_t paths = cfg.paths;
    const std::size_t steps = grid.size() - 1;
    const std::size_t blocks = (paths + kBlock - 1) / kBlock;
    const std::size_t dump_count = std::min(cfg.dump_paths, paths);
    const bool record = cfg.record_mean_path;

    std::vector<double> terminal(paths);
    std::vector<char> flagged(paths, 0);
    std::vector<std::vector<double>> block_sums(record ? blocks : 0);
    std::vector<std::vector<double>> trajectories(dump_count);

    parallel_blocks(blocks, cfg.threads, [&](std::size_t b) {
        const std::size_t begin = b * kBlock;
        const std::size_t end = std::min(paths, begin + kBlock);
        std::vector<double> z(dims);
        std::vector<double> sums(record ? steps + 1 : 0, 0.0);
        std::vector<double> traj;
        boost::random::normal_distribution<double> normal;
        for (std::size_t p = begin; p < end; ++p) {
            const bool track = record || p < dump_count;
            if (track) traj.assign(steps + 1, 0.0);
            PathRng rng(cfg.seed, cfg.antithetic ? p / 2 : p);
            const double sign = cfg.antithetic && (p % 2 == 1) ? -1.0 : 1.0;
            double wealth = x;
            if (track) traj[0] = wealth;
            bool ok = true;
            for (std::size_t k = 0; k < steps; ++k) {
                for (std::size_t j = 0; j < dims; ++j) z[j] = sign * normal(rng);
                wealth = advance(k, wealth, z.data());
                if (!std::isfinite(wealth)) {
                    ok = false;
                    break;
                }
                if (track) traj[k + 1] = wealth;
            }
            terminal[p] = wealth;
            flagged[p] = ok ? 0 : 1;
            if (ok && record) {
                for (std::size_t k = 0; k <= steps; ++k) sums[k] += traj[k];
            }
            if (p < dump_count) trajectories[p] = traj;
        }
        if (record) block_sums[b] = std::move(sums);
    });

    SimulationResult result;
    result.flagged_paths = static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
    result.paths_used = paths - result.flagged_paths;
    if (static_cast<double>(result.flagged_paths) > kMaxFlaggedFraction * static_cast<double>(paths)) {
        throw NumericError("simulation: " + std::to_string(result.flagged_paths) + " of " + std::to_string(paths) +
                           " paths became non-finite");
    }
    if (result.flagged_paths > 0) {
        result.warnings.push_back(std::to_string(result.flagged_paths) +
                                  " paths with non-finite wealth were excluded");
    }

    const Moments mom = sample_moments(terminal, flagged, cfg.antithetic);
    result.mean = mom.mean;
    result.variance = mom.variance;
    result.se_mean = mom.se_mean;
    result.se_variance = mom.se_variance;

    if (record) {
        result.time_grid = grid;
        result.mean_path.assign(steps + 1, 0.0);
        for (const auto& sums : block_sums) {
            for (std::size_t k = 0; k <= steps; ++k) result.mean_path[k] += sums[k];
        }
        for (double& v : result.mean_path) v /= static_cast<double>(result.paths_used);
        if (cfg.target_level) {
            result.stopping_time_estimate = first_crossing(grid, result.mean_path, *cfg.target_level);
        }
    }
    for (std::size_t p = 0; p < dump_count; ++p) {
        const auto& traj = trajectories[p];
        if (flagged[p]) continue;
        for (std::size_t k = 0; k < traj.size(); ++k) result.dump.push_back({p, grid[k], traj[k]});
    }
    return result;
}

// Discount factors e^{-int_{t_k}^tau r} at every grid point.
std::vector<double> discounts(const MarketModel& m, const std::vector<double>& grid, double tau) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = std::exp(-m.integral_r(grid[k], tau));
    return out;
}

}  // namespace

std::size_t resolve_thread_count(std::size_t requested) {
    std::size_t threads = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("VTMV_THREADS")) {
        char* endp = nullptr;
        const unsigned long cap = std::strtoul(env, &endp, 10);
        if (endp != env && cap > 0) threads = std::min<std::size_t>(threads, cap);
    }
    return std::max<std::size_t>(1, threads);
}

SimulationResult simulate_wealth(const MarketModel& m, const FeedbackStrategy& strategy, double x,
                                 const SimulationConfig& cfg) {
    const double tau = strategy.tau();
    check_config(cfg, tau);
    const auto grid = make_time_grid(0.0, tau, cfg.step, m.breakpoints());
    const std::size_t steps = grid.size() - 1;

    struct StepCoefficients {
        double dt;
        double sqrt_dt;
        double growth;  // e^{r dt}
        double phi;
        double neutral;  // gamma e^{-int_{t_k}^tau r}
        const Regime* regime;
    };
    const auto disc = discounts(m, grid, tau);
    std::vector<StepCoefficients> coeffs(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const Regime& g = m.regime_at(grid[k]);
        if (!g.factorized) throw AssumptionError("simulate_wealth: degenerate diffusion on [0, tau]");
        const double dt = grid[k + 1] - grid[k];
        coeffs[k] = {dt, std::sqrt(dt), std::exp(g.r * dt), g.phi, strategy.gamma() * disc[k], &g};
    }
    const std::size_t dims = m.d();

    auto advance = [&](std::size_t k, double wealth, const double* z) {
        const StepCoefficients& c = coeffs[k];
        const double gap = c.neutral - wealth;
        double shock = 0.0;
        const auto& loading = c.regime->loading;
        for (std::size_t j = 0; j < dims; ++j) shock += loading(static_cast<Eigen::Index>(j)) * z[j];
        return wealth * c.growth + c.phi * gap * c.dt + gap * shock * c.sqrt_dt;
    };
    return run_engine(grid, dims, x, cfg, advance);
}

SimulationResult simulate_wealth(const MarketModel& m, const StrategyRule& rule, double x, double tau,
                                 const SimulationConfig& cfg) {
    check_config(cfg, tau);
    const auto grid = make_time_grid(0.0, tau, cfg.step, m.breakpoints());
    std::vector<const Regime*> regimes(grid.size() - 1);
    std::vector<double> growth(grid.size() - 1);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        regimes[k] = &m.regime_at(grid[k]);
        growth[k] = std::exp(regimes[k]->r * (grid[k + 1] - grid[k]));
    }
    const std::size_t dims = m.d();

    auto advance = [&](std::size_t k, double wealth, const double* z) {
        const Regime& g = *regimes[k];
        const double dt = grid[k + 1] - grid[k];
        const Eigen::VectorXd pi = rule(grid[k], wealth);
        if (static_cast<std::size_t>(pi.size()) != m.n()) {
            throw StructuralError("strategy rule returned a vector of the wrong size");
        }
        const Eigen::RowVectorXd vol = pi.transpose() * g.sigma;
        const Eigen::Map<const Eigen::VectorXd> zv(z, static_cast<Eigen::Index>(dims));
        return wealth * growth[k] + g.beta.dot(pi) * dt + vol.dot(zv) * std::sqrt(dt);
    };
    return run_engine(grid, dims, x, cfg, advance);
}

std::optional<double> estimate_stopping_time(const MarketModel& m, const TargetCurve& tc, const StrategyRule& rule,
                                             double tau, StoppingMode mode, const SimulationConfig& cfg) {
    const double level = tc.wealth_at(tau);
    if (mode == StoppingMode::MonteCarlo) {
        SimulationConfig mc = cfg;
        mc.record_mean_path = true;
        mc.target_level = level;
        return simulate_wealth(m, rule, tc.x(), tau, mc).stopping_time_estimate;
    }
    const auto grid = make_time_grid(0.0, tau, cfg.step, m.breakpoints());
    auto rhs = [&](double t, double mean, double a) {
        const Regime& g = m.regime_at(a);
        return g.r * mean + g.beta.dot(rule(t, mean));
    };
    return first_crossing(grid, rk4_integrate(grid, tc.x(), rhs), level);
}

std::optional<double> estimate_stopping_time(const MarketModel& m, const TargetCurve& tc,
                                             const FeedbackStrategy& strategy, StoppingMode mode,
                                             const SimulationConfig& cfg) {
    const double tau = strategy.tau();
    const double level = tc.wealth_at(tau);
    if (mode == StoppingMode::MonteCarlo) {
        SimulationConfig mc = cfg;
        mc.record_mean_path = true;
        mc.target_level = level;
        return simulate_wealth(m, strategy, tc.x(), mc).stopping_time_estimate;
    }
    const auto grid = make_time_grid(0.0, tau, cfg.step, m.breakpoints());
    const auto disc = discounts(m, grid, tau);
    std::size_t idx = 0;
    // Affine rule: E[beta pi(t, X)] = phi (neutral(t) - E[X]).
    auto rhs = [&](double t, double mean, double a) {
        while (grid[idx] < a) ++idx;
        const Regime& g = m.regime_at(a);
        const double neutral = strategy.gamma() * disc[idx] * std::exp(g.r * (t - a));
        return g.r * mean + g.phi * (neutral - mean);
    };
    return first_crossing(grid, rk4_integrate(grid, tc.x(), rhs), level);
}

SimulationResult simulate_payoff(const EfficientPayoff& payoff, const SimulationConfig& cfg) {
    if (cfg.paths < 2) throw DomainError("simulation: paths must be >= 2");
    const std::size_t paths = cfg.paths;
    const std::size_t blocks = (paths + kBlock - 1) / kBlock;
    const double sqrt_tau = std::sqrt(payoff.tau);
    std::vector<double> values(paths);
    std::vector<char> flagged(paths, 0);
    parallel_blocks(blocks, cfg.threads, [&](std::size_t b) {
        boost::random::normal_distribution<double> normal;
        const std::size_t end = std::min(paths, (b + 1) * kBlock);
        for (std::size_t p = b * kBlock; p < end; ++p) {
            PathRng rng(cfg.seed, cfg.antithetic ? p / 2 : p);
            const double sign = cfg.antithetic && (p % 2 == 1) ? -1.0 : 1.0;
            values[p] = payoff.payoff(sign * sqrt_tau * normal(rng));
            flagged[p] = std::isfinite(values[p]) ? 0 : 1;
        }
    });
    SimulationResult result;
    result.flagged_paths = static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
    result.paths_used = paths - result.flagged_paths;
    const Moments mom = sample_moments(values, flagged, cfg.antithetic);
    result.mean = mom.mean;
    result.variance = mom.variance;
    result.se_mean = mom.se_mean;
    result.se_variance = mom.se_variance;
    return result;
}

void write_path_dump(std::ostream& out, const std::vector<PathPoint>& dump) {
    out << "path,t,wealth\n";
    for (const auto& p : dump) out << p.path << ',' << format_number(p.t) << ',' << format_number(p.wealth) << '\n';
}

}  // namespace vtmv
