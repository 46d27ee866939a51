// contract_lab command-line front end.
//
// Exit codes: 0 success, 1 verification failure or runtime error, 2 parse/validation error.

#include "contract_lab/io.hpp"
#include "contract_lab/parallel.hpp"
#include "contract_lab/sweep.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace contract_lab;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string config;
    std::string out;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
    std::optional<int> steps;
    std::string paths_csv;
    bool full_post_default = false;
    bool unadjusted_post_default_effort = false;
    double perturb_phi = 0.0;
    int grid_points = 101;
};

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

SimConfig sim_config(const Options& o, SimConfig cfg) {
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.paths) cfg.n_paths = *o.paths;
    if (o.steps) cfg.n_steps = *o.steps;
    cfg.threads = default_thread_count();
    cfg.full_post_default = o.full_post_default;
    validate(cfg);
    return cfg;
}

int cmd_solve(const Options& o) {
    const auto c = load_config(o.config);
    std::ostringstream os;
    if (const auto* m = std::get_if<Mitigation>(&c.variant)) {
        const auto sol = solve_mitigation(c.params, c.intensity, m->theta, m->invest_cost);
        if (o.format == "csv")
            write_solution_csv(os, sol.contract, o.grid_points);
        else
            os << dump(solution_json(sol, o.grid_points));
    } else {
        const auto sol = solve(c.params, c.intensity, c.variant);
        if (o.format == "csv")
            write_solution_csv(os, sol, o.grid_points);
        else
            os << dump(solution_json(sol, o.grid_points));
    }
    emit(os.str(), o.out);
    return 0;
}

int cmd_simulate(const Options& o) {
    const auto c = load_config(o.config);
    require_valid(c.params, c.intensity, c.variant);
    SimConfig cfg = sim_config(o, SimConfig{});
    cfg.keep_paths = o.format == "csv" || !o.paths_csv.empty();

    WagePolicy policy;
    if (const auto* m = std::get_if<Mitigation>(&c.variant))
        policy = optimal_policy(solve_mitigation(c.params, c.intensity, m->theta, m->invest_cost),
                                !o.unadjusted_post_default_effort);
    else
        policy = optimal_policy(solve(c.params, c.intensity, c.variant));
    const auto report = simulate_paths(c.params, c.intensity, policy, cfg);

    if (!o.paths_csv.empty()) {
        std::ostringstream csv;
        write_paths_csv(csv, report.paths);
        emit(csv.str(), o.paths_csv);
    }
    std::ostringstream os;
    if (o.format == "csv") {
        write_paths_csv(os, report.paths);
    } else {
        Json j = to_json(report);
        j["config"] = to_json(c);
        os << dump(j);
    }
    emit(os.str(), o.out);
    return 0;
}

int cmd_verify(const Options& o) {
    const auto c = load_config(o.config);
    require_valid(c.params, c.intensity, c.variant);
    VerifyOptions vo;
    vo.sim = sim_config(o, vo.sim);
    vo.phi_perturbation = o.perturb_phi;
    const auto report = run_verification(c.params, c.intensity, c.variant, vo);
    Json j = to_json(report);
    j["config"] = to_json(c);
    emit(dump(j), o.out);
    return report.passed() ? 0 : kExitFailure;
}

int cmd_sweep(const Options& o) {
    auto spec = parse_sweep(read_json_file(o.config));
    if (o.seed) spec.seed = *o.seed;
    const auto table = run_sweep_table(spec, default_thread_count());
    std::ostringstream os;
    if (o.format == "json")
        os << dump(to_json(table));
    else
        write_csv(os, table);
    emit(os.str(), o.out);
    return 0;
}

int cmd_figures(const Options& o) {
    const auto files = write_figure_bundle(o.out, o.seed.value_or(42), default_thread_count());
    for (const auto& f : files) std::cout << f << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal contracts under shutdown risk: solve, simulate, verify, sweep"};
    app.require_subcommand(1);
    Options o;

    std::string solve_format = "json", sim_format = "json", sweep_format = "csv";
    auto add_format = [](CLI::App* sub, std::string& target) {
        sub->add_option("--format", target, "Output format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    };
    auto add_sim = [&o](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Master seed");
        sub->add_option("--paths", o.paths, "Number of Monte-Carlo paths")->check(CLI::PositiveNumber);
        sub->add_option("--steps", o.steps, "Time steps on [0,T] (>= 64)")->check(CLI::Range(64, 1 << 24));
    };

    auto* solve_cmd = app.add_subcommand("solve", "Solve the configured contract");
    solve_cmd->add_option("--config", o.config, "Problem config (JSON)")->required();
    solve_cmd->add_option("--out", o.out, "Output file (default stdout)");
    solve_cmd->add_option("--grid-points", o.grid_points, "Time grid size")->check(CLI::Range(2, 1000000));
    add_format(solve_cmd, solve_format);

    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo simulation of the optimal contract");
    sim_cmd->add_option("--config", o.config, "Problem config (JSON)")->required();
    sim_cmd->add_option("--out", o.out, "Output file (default stdout)");
    sim_cmd->add_option("--paths-csv", o.paths_csv, "Also write per-path CSV here");
    sim_cmd->add_flag("--full-post-default", o.full_post_default,
                      "Mitigation: simulate the restarted contract after an investment");
    sim_cmd->add_flag("--unadjusted-post-default-effort", o.unadjusted_post_default_effort,
                      "Mitigation: use theta*Z*/kappa instead of theta*Z1/kappa after a restart");
    add_sim(sim_cmd);
    add_format(sim_cmd, sim_format);

    auto* verify_cmd = app.add_subcommand("verify", "Run the optimality certification checks");
    verify_cmd->add_option("--config", o.config, "Problem config (JSON)")->required();
    verify_cmd->add_option("--out", o.out, "Output file (default stdout)");
    verify_cmd->add_option("--perturb-phi", o.perturb_phi, "Debug: add this constant to Phi");
    add_sim(verify_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep to CSV");
    sweep_cmd->add_option("--config", o.config, "Sweep spec (JSON)")->required();
    sweep_cmd->add_option("--out", o.out, "Output file (default stdout)");
    sweep_cmd->add_option("--seed", o.seed, "Seed for Monte-Carlo metrics");
    add_format(sweep_cmd, sweep_format);

    auto* fig_cmd = app.add_subcommand("figures", "Write the preset figure-data bundle");
    fig_cmd->add_option("--out", o.out, "Output directory")->required();
    fig_cmd->add_option("--seed", o.seed, "Seed for Monte-Carlo metrics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*solve_cmd) {
            o.format = solve_format;
            return cmd_solve(o);
        }
        if (*sim_cmd) {
            o.format = sim_format;
            return cmd_simulate(o);
        }
        if (*verify_cmd) return cmd_verify(o);
        if (*sweep_cmd) {
            o.format = sweep_format;
            return cmd_sweep(o);
        }
        if (*fig_cmd) return cmd_figures(o);
    } catch (const ValidationError& e) {
        std::cerr << "validation failed:\n";
        for (const auto& v : e.violations()) std::cerr << "  - " << v << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const OverflowError& e) {
        std::cerr << "overflow: " << e.what() << " (master seed " << e.master_seed() << ", path "
                  << e.path_id() << ")\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
