// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
//
// Command-line interface for the retrofit-option library.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "retrofit/cli.hpp"

namespace {

struct Cmd {
    std::string name;
    std::string help;
    int (*run)(const retrofit::config::RunConfig&, const retrofit::cli::Options&, std::ostream&);
    bool has_grid = false;
    bool has_paths = false;
    bool has_subsidized = false;
};

const Cmd kCommands[] = {
    {"validate", "check the parameter set and report every validation margin",
     retrofit::cli::run_validate},
    {"solve", "derived constants, value functions and optimal controls on a wealth grid",
     retrofit::cli::run_solve, true, false, true},
    {"simulate", "sample wealth/consumption trajectories with the stopping rule applied",
     retrofit::cli::run_simulate, false, true, true},
    {"welfare", "social cost, private gain and total welfare over a (wealth, carbon) grid",
     retrofit::cli::run_welfare, true},
    {"subsidy", "optimal subsidy rate over a (wealth, carbon) grid", retrofit::cli::run_subsidy,
     true},
    {"diffuse", "population adoption share, adoption rate and aggregate consumption",
     retrofit::cli::run_diffuse, true},
    {"statics", "elasticities of the investment threshold and the optimal subsidy",
     retrofit::cli::run_statics},
    {"depth", "household-optimal retrofit depth along an efficiency-cost menu",
     retrofit::cli::run_depth},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"retrofit-option: optimal energy-efficiency investment under uncertainty"};
    app.require_subcommand(1);

    std::string config_path;
    retrofit::cli::Options opt;
    std::uint64_t seed_val = 0;
    std::uint64_t n_paths_val = 0;

    const Cmd* selected = nullptr;
    for (const auto& cmd : kCommands) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", config_path, "configuration file (key = value lines)");
        sub->add_option("--out", opt.out_dir, "output directory (default: ./out)");
        auto* seed_opt = sub->add_option("--seed", seed_val, "random seed override");
        CLI::Option* paths_opt = nullptr;
        if (cmd.has_grid)
            sub->add_option("--grid", opt.grid_spec, "grid spec, e.g. w=0:900000:61[,...]");
        if (cmd.has_paths)
            paths_opt = sub->add_option("--n-paths", n_paths_val, "number of simulated paths");
        if (cmd.has_subsidized)
            sub->add_flag("--subsidized", opt.subsidized,
                          "apply the agent's optimal subsidy before solving");
        sub->callback([&, seed_opt, paths_opt, pcmd = &cmd] {
            if (seed_opt->count()) opt.seed = seed_val;
            if (paths_opt && paths_opt->count()) opt.n_paths = n_paths_val;
            selected = pcmd;
        });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = config_path.empty() ? retrofit::config::RunConfig{}
                                             : retrofit::config::load(config_path);
        return selected->run(cfg, opt, std::cout);
    } catch (const retrofit::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const retrofit::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const retrofit::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
