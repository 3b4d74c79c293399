// Acceptance checks: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "vtmv/classical_mv.hpp"
#include "vtmv/figures.hpp"
#include "vtmv/montecarlo.hpp"
#include "vtmv/terminal_time.hpp"

using namespace vtmv;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << what << "  [" << detail << "]\n";
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

MarketModel reference_market(std::size_t n = 1) { return MarketModel::identical_assets(n, 0.05, 0.10, 0.20); }

TargetCurve constant_target(const MarketModel& m, double theta, double x = 1.0, double alpha = 0.5) {
    return TargetCurve(x, alpha, ScalarSchedule(theta), m);
}

std::vector<std::optional<double>> cells(const Table& t, const std::string& name) {
    const std::size_t c = t.column(name);
    std::vector<std::optional<double>> out;
    for (const auto& row : t.rows) out.push_back(row[c]);
    return out;
}

// Runs `fn`, reporting FAIL with the exception text if it throws.
void guarded(int id, const std::string& what, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(id, false, what, std::string("exception: ") + e.what());
    }
}

void criterion1() {
    guarded(1, "tau* of the reference market in [2.71, 2.73], runtime < 1 s", [] {
        const auto t0 = Clock::now();
        const MarketModel m = reference_market();
        const double closed = tau_star_constant(0.40, m.phi_at(0.0));
        const auto root = smallest_root(m, constant_target(m, 0.40));
        const double secs = seconds_since(t0);
        const bool ok = closed >= 2.71 && closed <= 2.73 && root.tau_star && *root.tau_star >= 2.71 &&
                        *root.tau_star <= 2.73 && secs < 1.0;
        report(1, ok, "tau* of the reference market in [2.71, 2.73], runtime < 1 s",
               fmt("closed form %.10f, root search %.10f, %.3f s", closed, root.tau_star.value_or(NAN), secs));
    });
}

void criterion2() {
    guarded(2, "kappa = 6.4 exactly", [] {
        const MarketModel m = reference_market();
        const TargetCurve tc = constant_target(m, 0.40);
        const auto kappa = constant_kappa(m, tc);
        const auto sol = smallest_root(m, tc);
        const bool ok = kappa && *kappa == 6.4 && sol.kappa && *sol.kappa == 6.4;
        report(2, ok, "kappa = 6.4 exactly", fmt("kappa %.17g", kappa.value_or(NAN)));
    });
}

void plan_criterion(int id, double theta_half, double tau_expected, double var_expected, const std::string& what) {
    guarded(id, what, [&] {
        const MarketModel m = reference_market();
        const auto sol = solve_terminal_time(m, constant_target(m, 2.0 * theta_half));
        const bool ok = sol.kind == TerminalCase::FiniteOptimum && sol.tau_star && sol.var_star &&
                        std::abs(*sol.tau_star - tau_expected) <= 0.01 &&
                        std::abs(*sol.var_star - var_expected) <= 0.01;
        report(id, ok, what,
               fmt("tau* %.6f, Var* %.6f", sol.tau_star.value_or(NAN), sol.var_star.value_or(NAN)));
    });
}

void criterion5() {
    const std::string what = "figure-2 dominance on all 101 rows, tangency near 0.43 and 0.225";
    guarded(5, what, [&] {
        const MarketModel m = reference_market();
        const Table t = figure2(m, constant_target(m, 0.40));
        const auto half = cells(t, "theta_half");
        const auto v12 = cells(t, "var_tau12");
        const auto v24 = cells(t, "var_tau24");
        const auto vs = cells(t, "var_taustar");
        bool dominated = t.rows.size() == 101;
        std::size_t best12 = 0, best24 = 0;
        for (std::size_t k = 0; k < t.rows.size(); ++k) {
            if (!vs[k] || !(*vs[k] <= std::min(*v12[k], *v24[k]))) dominated = false;
            if (std::abs(*v12[k] - *vs[k]) < std::abs(*v12[best12] - *vs[best12])) best12 = k;
            if (std::abs(*v24[k] - *vs[k]) < std::abs(*v24[best24] - *vs[best24])) best24 = k;
        }
        const double step = *half[1] - *half[0];
        const bool tangent = std::abs(*half[best12] - 0.43) <= step + 1e-12 &&
                             std::abs(*half[best24] - 0.225) <= step + 1e-12;
        report(5, dominated && tangent, what,
               fmt("tangency rows at theta/2 = %.4f and %.4f, grid step %.4f", *half[best12], *half[best24], step));
    });
}

void criterion6() {
    const std::string what = "figure-4 tau*(n) strictly increasing for n = 1..6, case (ii) at n = 7";
    guarded(6, what, [&] {
        const MarketModel m = reference_market();
        const TargetCurve tc = constant_target(m, 0.40);
        const Table t = figure4(m, tc, 7);
        const auto tau = cells(t, "tau_star");
        bool increasing = t.rows.size() == 7;
        for (std::size_t k = 0; k < 6; ++k) {
            if (!tau[k] || (k > 0 && !(*tau[k] > *tau[k - 1]))) increasing = false;
        }
        const MarketModel m7 = reference_market(7);
        const bool flagged = !tau[6] && classify_case(m7, constant_target(m7, 0.40), 100.0, 1e-3).kind ==
                                            TerminalCase::InfimumAtInfinity;
        report(6, increasing && flagged, what, fmt("tau*(1) %.4f, tau*(6) %.4f", *tau[0], *tau[5]));
    });
}

struct RandomSpec {
    MarketModel market;
    TargetCurve target;
    double tau;
    double kappa;
};

std::vector<RandomSpec> random_suite() {
    std::mt19937_64 gen(0x5eed2024);
    std::uniform_int_distribution<int> assets(1, 3);
    std::uniform_real_distribution<double> rate(0.01, 0.06), premium(0.02, 0.10), vol(0.15, 0.40),
        corr(-0.3, 0.3), wealth(0.5, 2.0), alpha(0.1, 1.0), horizon(0.25, 1.0),
        log_kappa(std::log(1.1), std::log(30.0));
    std::vector<RandomSpec> out;
    while (out.size() < 20) {
        const auto n = static_cast<std::size_t>(assets(gen));
        const double r = rate(gen);
        Eigen::VectorXd b(n);
        Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
            b(i) = r + premium(gen);
            sigma(i, i) = vol(gen);
            for (Eigen::Index j = 0; j < i; ++j) sigma(i, j) = corr(gen) * sigma(i, i);
        }
        MarketModel m = MarketModel::constant(r, b, sigma);
        const double phi = m.phi_at(0.0);
        const double kappa = std::exp(log_kappa(gen));
        TargetCurve tc(wealth(gen), alpha(gen), ScalarSchedule(kappa * phi), m);
        const double tau = horizon(gen);
        if (!validate_market(m).ok() || !validate_target(tc).ok()) continue;
        out.push_back({std::move(m), std::move(tc), tau, kappa});
    }
    return out;
}

void criteria7and8() {
    const std::string what7 = "oracle triangle on 20 random specs: ODE within 1e-6, MC within 4 se, < 60 s";
    const std::string what8 = "stopping time of the optimal strategy equals tau within one ODE step";
    try {
        const auto t0 = Clock::now();
        const auto suite = random_suite();
        double worst_ode = 0.0, worst_z = 0.0, worst_stop = 0.0;
        bool ok7 = true, ok8 = true;
        for (std::size_t k = 0; k < suite.size(); ++k) {
            const RandomSpec& s = suite[k];
            const auto sol = solve_classical(s.market, s.target, s.tau);
            const double closed = sol.frontier_variance;
            const double ode = second_moment_at_tau(sol, 1e-3) - std::pow(mean_path(sol, s.tau), 2);
            SimulationConfig cfg;
            cfg.paths = 100000;
            cfg.step = 1e-3;
            cfg.seed = 1000 + k;
            const FeedbackStrategy fs(sol);
            const auto mc = simulate_wealth(s.market, fs, s.target.x(), cfg);
            const double z = std::abs(mc.variance - closed) / mc.se_variance;
            const double ode_err = std::abs(ode - closed);
            worst_ode = std::max(worst_ode, ode_err);
            worst_z = std::max(worst_z, z);
            if (!(ode_err < 1e-6) || !(z < 4.0) || !(s.kappa > 1.1 && s.kappa < 30.0)) {
                ok7 = false;
                std::cout << "  spec " << k << ": n " << s.market.n() << ", kappa " << s.kappa << ", tau " << s.tau
                          << ", closed " << closed << ", ode error " << ode_err << ", mc z " << z << '\n';
            }
            const auto stop = estimate_stopping_time(s.market, s.target, fs, StoppingMode::Ode, cfg);
            const double gap = stop ? std::abs(*stop - s.tau) : std::numeric_limits<double>::infinity();
            worst_stop = std::max(worst_stop, gap);
            if (!(gap <= cfg.step)) ok8 = false;
        }
        const double secs = seconds_since(t0);
        report(7, ok7 && secs < 60.0, what7,
               fmt("max ODE error %.3g, max MC |z| %.3f, %.1f s", worst_ode, worst_z, secs));
        report(8, ok8, what8, fmt("max |stop - tau| %.3g", worst_stop));
    } catch (const std::exception& e) {
        report(7, false, what7, std::string("exception: ") + e.what());
        report(8, false, what8, std::string("exception: ") + e.what());
    }
}

void criterion9() {
    const std::string what = "theta = 0.05 <= phi: InfimumAtInfinity, variance strictly decreasing on [0.1, 100]";
    guarded(9, what, [&] {
        const MarketModel m = reference_market();
        const TargetCurve tc = constant_target(m, 0.05);
        const auto cls = classify_case(m, tc, 100.0, 1e-3);
        const auto taus = linspace(0.1, 100.0, 99901);
        bool decreasing = true;
        for (std::size_t k = 1; k < taus.size(); ++k) {
            if (!(frontier_variance(m, tc, taus[k]) < frontier_variance(m, tc, taus[k - 1]))) decreasing = false;
        }
        const auto sol = solve_terminal_time(m, tc);
        const bool ok = cls.kind == TerminalCase::InfimumAtInfinity && sol.kind == TerminalCase::InfimumAtInfinity &&
                        !sol.tau_star && decreasing && sol.monotone_decreasing;
        report(9, ok, what,
               fmt("Var(0.1) %.6f, Var(100) %.6g", frontier_variance(m, tc, 0.1), frontier_variance(m, tc, 100.0)));
    });
}

void criterion10() {
    const std::string what = "efficient payoff law: variance 1.0 and mean 1.30526 within 4 se, < 10 s";
    guarded(10, what, [&] {
        const auto t0 = Clock::now();
        const auto payoff = efficient_payoff(reference_market(), 1.0, 1.0, 1.0);
        SimulationConfig cfg;
        cfg.paths = 1000000;
        cfg.seed = 1;
        const auto res = simulate_payoff(payoff, cfg);
        const double secs = seconds_since(t0);
        const double mean = std::exp(0.05) + std::sqrt(std::expm1(0.0625));
        const double zv = std::abs(res.variance - 1.0) / res.se_variance;
        const double zm = std::abs(res.mean - mean) / res.se_mean;
        report(10, zv < 4.0 && zm < 4.0 && secs < 10.0, what,
               fmt("|z| variance %.3f, |z| mean %.3f, %.2f s", zv, zm, secs));
    });
}

std::string capture(const std::string& cmd, int& status) {
    std::string out;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    status = ::pclose(pipe);
    return out;
}

void criterion11() {
    const std::string what = "two simulate runs with identical flags give byte-identical output";
    guarded(11, what, [&] {
        const auto dir = std::filesystem::temp_directory_path() / "vtmv_acceptance";
        std::filesystem::create_directories(dir);
        const auto spec = dir / "spec.json";
        std::ofstream(spec) << R"({"n": 1, "r": 0.05, "b": [0.10], "sigma": [[0.20]],
                                   "x": 1.0, "alpha": 0.5, "theta": 0.40})";
        const std::string cmd = std::string(VTMV_BINARY) + " simulate --spec " + spec.string() +
                                " --tau 1 --seed 42 --paths 100000 --step 0.001";
        int s1 = 0, s2 = 0;
        const std::string a = capture(cmd, s1);
        const std::string b = capture(cmd, s2);
        std::filesystem::remove_all(dir);
        const bool ok = s1 == 0 && s2 == 0 && !a.empty() && a == b;
        report(11, ok, what, fmt("%.0f bytes per run, exit statuses %.0f and %.0f", static_cast<double>(a.size()), s1, s2));
    });
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    plan_criterion(3, 0.05, 15.69, 0.72, "theta/2 = 0.05: tau* = 15.69 +- 0.01 and Var* = 0.72 +- 0.01");
    plan_criterion(4, 0.55, 0.94, 11.62, "theta/2 = 0.55: tau* = 0.94 +- 0.01 and Var* = 11.62 +- 0.01");
    criterion5();
    criterion6();
    criteria7and8();
    criterion9();
    criterion10();
    criterion11();
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
