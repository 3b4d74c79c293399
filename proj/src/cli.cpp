#include "vtmv/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vtmv/classical_mv.hpp"
#include "vtmv/figures.hpp"
#include "vtmv/montecarlo.hpp"
#include "vtmv/run_spec.hpp"
#include "vtmv/terminal_time.hpp"

namespace vtmv {

namespace {

using nlohmann::json;

struct Options {
    std::string spec_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> step;
    // frontier
    std::optional<double> tau_min;
    std::optional<double> tau_max;
    std::optional<std::size_t> points;
    std::optional<double> tau;
    // solve
    std::optional<double> horizon;
    std::optional<double> grid;
    std::optional<double> tol;
    // simulate
    bool antithetic = false;
    std::string strategy;
    std::size_t dump_paths = 0;
    std::string dump_file;
    // figures
    int which = 0;
    std::size_t n_max = 6;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--spec", o.spec_path, "JSON model specification")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_path, "Output file (stdout when omitted)");
    cmd->add_option("--seed", o.seed, "Monte Carlo seed");
    cmd->add_option("--paths", o.paths, "Monte Carlo paths");
    cmd->add_option("--step", o.step, "Time step in years");
}

// Writes to --out when given, otherwise to the supplied stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw StructuralError("cannot open output file " + path);
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

RunSpec load_with_overrides(const Options& o) {
    RunSpec spec = load_run_spec(o.spec_path);
    if (o.seed) spec.simulation.seed = *o.seed;
    if (o.paths) spec.simulation.paths = *o.paths;
    if (o.step) spec.simulation.step = *o.step;
    if (o.tau_min) spec.frontier.tau_min = *o.tau_min;
    if (o.tau_max) spec.frontier.tau_max = *o.tau_max;
    if (o.points) spec.frontier.points = *o.points;
    if (o.tau) spec.tau = *o.tau;
    if (o.horizon) spec.scan.horizon = *o.horizon;
    if (o.grid) spec.scan.grid = *o.grid;
    if (o.tol) spec.scan.tol = *o.tol;
    if (o.antithetic) spec.simulation.antithetic = true;
    if (o.dump_paths > 0) spec.simulation.dump_paths = o.dump_paths;
    if (o.strategy == "zero") spec.strategy = StrategyChoice::Zero;
    if (o.strategy == "optimal") spec.strategy = StrategyChoice::Optimal;
    return spec;
}

ValidationReport validate(const RunSpec& spec) {
    ValidationReport report = validate_market(spec.market);
    report.merge(validate_target(spec.target));
    return report;
}

void require_valid(const RunSpec& spec) {
    const ValidationReport report = validate(spec);
    if (report.ok()) return;
    std::string msg = "model assumptions violated:";
    for (const auto& v : report.violations) msg += "\n  " + v.message;
    throw AssumptionError(msg);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_validate(const Options& o, std::ostream& out) {
    const RunSpec spec = load_with_overrides(o);
    const ValidationReport report = validate(spec);
    Sink sink(o.out_path, out);
    if (report.ok()) {
        *sink << "ok\n";
        return kExitOk;
    }
    for (const auto& v : report.violations) *sink << v.message << '\n';
    return kExitAssumption;
}

int cmd_frontier(const Options& o, std::ostream& out) {
    const RunSpec spec = load_with_overrides(o);
    require_valid(spec);
    std::vector<double> taus;
    if (o.tau) {
        taus.push_back(*o.tau);
    } else {
        const FrontierGrid& g = spec.frontier;
        if (!(g.tau_min > 0.0 && g.tau_min < g.tau_max) || g.points < 2) {
            throw DomainError("frontier: need 0 < tau_min < tau_max and points >= 2");
        }
        taus = linspace(g.tau_min, g.tau_max, g.points);
    }
    Sink sink(o.out_path, out);
    write_csv(*sink, frontier_table(spec.market, spec.target, taus));
    return kExitOk;
}

json solution_json(const TerminalTimeSolution& sol) {
    json j;
    j["case"] = std::string(to_string(sol.kind));
    j["tau_star"] = optional_number(sol.tau_star);
    j["var_star"] = optional_number(sol.var_star);
    j["kappa"] = optional_number(sol.kappa);
    j["delta_margin"] = sol.delta_margin;
    j["bracket"] = sol.bracket ? json::array({sol.bracket->first, sol.bracket->second}) : json(nullptr);
    j["global_minimum_on_grid"] = sol.global_minimum_on_grid;
    j["monotone_decreasing"] = sol.monotone_decreasing;
    j["horizon_variance"] = optional_number(sol.horizon_variance);
    j["outside_hypotheses"] = sol.outside_hypotheses;
    return j;
}

int cmd_solve(const Options& o, std::ostream& out) {
    const RunSpec spec = load_with_overrides(o);
    require_valid(spec);
    const TerminalTimeSolution sol = solve_terminal_time(spec.market, spec.target, spec.scan);
    Sink sink(o.out_path, out);
    *sink << solution_json(sol).dump(2) << '\n';
    return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const RunSpec spec = load_with_overrides(o);
    require_valid(spec);
    const MarketModel& m = spec.market;
    const TargetCurve& tc = spec.target;

    double tau = 0.0;
    if (spec.tau) {
        tau = *spec.tau;
    } else {
        const TerminalTimeSolution sol = solve_terminal_time(m, tc, spec.scan);
        if (sol.kind != TerminalCase::FiniteOptimum) {
            throw NumericError("simulate: no finite optimal horizon for this model; pass --tau");
        }
        tau = *sol.tau_star;
    }

    const ClassicalSolution classical = solve_classical(m, tc, tau);
    const FeedbackStrategy strategy(classical);
    SimulationResult res;
    double cf_mean = 0.0;
    double cf_var = 0.0;
    json stopping = nullptr;
    if (spec.strategy == StrategyChoice::Optimal) {
        res = simulate_wealth(m, strategy, tc.x(), spec.simulation);
        cf_mean = classical.target_mean;
        cf_var = classical.frontier_variance;
        const auto t = estimate_stopping_time(m, tc, strategy, StoppingMode::Ode, spec.simulation);
        if (t) stopping = *t;
    } else {
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.n()));
        const StrategyRule rule = [zero](double, double) { return zero; };
        res = simulate_wealth(m, rule, tc.x(), tau, spec.simulation);
        cf_mean = tc.x() * std::exp(m.integral_r(0.0, tau));
        cf_var = 0.0;
        const auto t = estimate_stopping_time(m, tc, rule, tau, StoppingMode::Ode, spec.simulation);
        if (t) stopping = *t;
    }

    json j;
    j["tau"] = tau;
    j["strategy"] = spec.strategy == StrategyChoice::Optimal ? "optimal" : "zero";
    j["paths"] = spec.simulation.paths;
    j["step"] = spec.simulation.step;
    j["seed"] = spec.simulation.seed;
    j["antithetic"] = spec.simulation.antithetic;
    j["mean"] = res.mean;
    j["variance"] = res.variance;
    j["se_mean"] = res.se_mean;
    j["se_variance"] = res.se_variance;
    j["paths_used"] = res.paths_used;
    j["flagged_paths"] = res.flagged_paths;
    j["closed_form_mean"] = cf_mean;
    j["closed_form_variance"] = cf_var;
    j["z_mean"] = res.se_mean > 0.0 ? json((res.mean - cf_mean) / res.se_mean) : json(nullptr);
    j["z_variance"] = res.se_variance > 0.0 ? json((res.variance - cf_var) / res.se_variance) : json(nullptr);
    j["stopping_time_estimate"] = stopping;
    j["warnings"] = res.warnings;

    Sink sink(o.out_path, out);
    *sink << j.dump(2) << '\n';
    if (!o.dump_file.empty()) {
        std::ofstream dump(o.dump_file);
        if (!dump) throw StructuralError("cannot open dump file " + o.dump_file);
        write_path_dump(dump, res.dump);
    }
    return kExitOk;
}

Table build_figure(int which, const RunSpec& spec, std::size_t n_max) {
    switch (which) {
        case 1: return figure1(spec.market, spec.target, spec.frontier);
        case 2: return figure2(spec.market, spec.target, spec.scan);
        case 3: return figure3(spec.market, spec.target, spec.scan);
        case 4: return figure4(spec.market, spec.target, n_max);
        default: throw DomainError("figures: --which must be 0 (all) or 1..4");
    }
}

int cmd_figures(const Options& o, std::ostream& out) {
    const RunSpec spec = load_with_overrides(o);
    require_valid(spec);
    if (o.which != 0) {
        Sink sink(o.out_path, out);
        write_csv(*sink, build_figure(o.which, spec, o.n_max));
        return kExitOk;
    }
    const std::filesystem::path dir = o.out_path.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out_path);
    std::filesystem::create_directories(dir);
    for (int which = 1; which <= 4; ++which) {
        const auto file = dir / ("figure" + std::to_string(which) + ".csv");
        std::ofstream f(file);
        if (!f) throw StructuralError("cannot open output file " + file.string());
        write_csv(f, build_figure(which, spec, o.n_max));
        out << file.string() << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Varying-terminal-time mean-variance solver", "vtmv"};
    app.require_subcommand(1);
    Options o;

    auto* validate_cmd = app.add_subcommand("validate", "Check model assumptions");
    add_common(validate_cmd, o);

    auto* frontier_cmd = app.add_subcommand("frontier", "Frontier variance over a horizon grid (CSV)");
    add_common(frontier_cmd, o);
    frontier_cmd->add_option("--tau-min", o.tau_min);
    frontier_cmd->add_option("--tau-max", o.tau_max);
    frontier_cmd->add_option("--points", o.points);
    frontier_cmd->add_option("--tau", o.tau, "Single horizon instead of a grid");

    auto* solve_cmd = app.add_subcommand("solve", "Optimal terminal time (JSON)");
    add_common(solve_cmd, o);
    solve_cmd->add_option("--horizon", o.horizon);
    solve_cmd->add_option("--grid", o.grid);
    solve_cmd->add_option("--tol", o.tol);

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo check of the optimal strategy (JSON)");
    add_common(simulate_cmd, o);
    simulate_cmd->add_option("--tau", o.tau, "Horizon (default: optimal tau*)");
    simulate_cmd->add_option("--horizon", o.horizon);
    simulate_cmd->add_option("--grid", o.grid);
    simulate_cmd->add_option("--tol", o.tol);
    simulate_cmd->add_flag("--antithetic", o.antithetic);
    simulate_cmd->add_option("--strategy", o.strategy)->check(CLI::IsMember({"optimal", "zero"}));
    simulate_cmd->add_option("--dump-paths", o.dump_paths, "Trajectories to dump");
    simulate_cmd->add_option("--dump-file", o.dump_file, "CSV file for dumped trajectories");

    auto* figures_cmd = app.add_subcommand("figures", "Figure datasets (CSV)");
    add_common(figures_cmd, o);
    figures_cmd->add_option("--which", o.which, "1..4, or 0 for all (then --out is a directory)")
        ->check(CLI::Range(0, 4));
    figures_cmd->add_option("--n-max", o.n_max, "Largest asset count for figure 4");
    figures_cmd->add_option("--horizon", o.horizon);
    figures_cmd->add_option("--grid", o.grid);
    figures_cmd->add_option("--tau-min", o.tau_min);
    figures_cmd->add_option("--tau-max", o.tau_max);
    figures_cmd->add_option("--points", o.points);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    }

    try {
        if (*validate_cmd) return cmd_validate(o, out);
        if (*frontier_cmd) return cmd_frontier(o, out);
        if (*solve_cmd) return cmd_solve(o, out);
        if (*simulate_cmd) return cmd_simulate(o, out);
        if (*figures_cmd) return cmd_figures(o, out);
    } catch (const StructuralError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const AssumptionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitAssumption;
    } catch (const UnsupportedModelError& e) {
        err << "error: " << e.what() << '\n';
        return kExitAssumption;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    }
    return kExitParse;
}

}  // namespace vtmv
