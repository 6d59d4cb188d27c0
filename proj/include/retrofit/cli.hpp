// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "retrofit/aggregate.hpp"
#include "retrofit/analysis.hpp"
#include "retrofit/common.hpp"
#include "retrofit/config.hpp"
#include "retrofit/io.hpp"
#include "retrofit/params.hpp"
#include "retrofit/solution.hpp"
#include "retrofit/stochastic.hpp"
#include "retrofit/subsidy.hpp"
#include "retrofit/welfare.hpp"

// Subcommand implementations behind the command-line tool.  Kept free of
// argument-parsing machinery so tests can drive them directly.

namespace retrofit::cli {

// ---------------------------------------------------------------------------
// Options and grids
// ---------------------------------------------------------------------------

struct GridAxis {
    double lo = 0.0, hi = 0.0;
    int n = 1;
};

inline std::vector<double> axis_values(const GridAxis& ax) {
    if (ax.n < 1) throw ConfigError("grid axis: need at least one point");
    std::vector<double> v;
    if (ax.n == 1) {
        v.push_back(ax.lo);
        return v;
    }
    for (int i = 0; i < ax.n; ++i)
        v.push_back(ax.lo + (ax.hi - ax.lo) * static_cast<double>(i) / (ax.n - 1));
    return v;
}

// Parse "w=0:900000:61,carbon=10:70:7" into named axes.
inline std::map<std::string, GridAxis> parse_grid(const std::string& spec) {
    std::map<std::string, GridAxis> out;
    if (spec.empty()) return out;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = config::trim(item);
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("grid spec: expected name=lo:hi:n, got '" + item + "'");
        const std::string name = config::trim(item.substr(0, eq));
        const std::string rest = item.substr(eq + 1);
        const auto c1 = rest.find(':');
        const auto c2 = rest.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ConfigError("grid spec: expected name=lo:hi:n, got '" + item + "'");
        GridAxis ax;
        ax.lo = config::detail::as_double("grid " + name, config::trim(rest.substr(0, c1)));
        ax.hi = config::detail::as_double("grid " + name,
                                          config::trim(rest.substr(c1 + 1, c2 - c1 - 1)));
        const auto n64 = config::detail::as_u64("grid " + name, config::trim(rest.substr(c2 + 1)));
        if (n64 == 0 || n64 > 1000000) throw ConfigError("grid spec: point count out of range");
        ax.n = static_cast<int>(n64);
        if (ax.n > 1 && ax.hi <= ax.lo)
            throw ConfigError("grid spec: need hi > lo for more than one point");
        if (!out.emplace(name, ax).second)
            throw ConfigError("grid spec: duplicate axis '" + name + "'");
    }
    return out;
}

struct Options {
    std::string out_dir = "out";
    std::string grid_spec;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> n_paths;
    bool subsidized = false;
};

namespace detail {

inline config::RunConfig resolve(config::RunConfig cfg, const Options& opt) {
    if (opt.seed) {
        cfg.seed = *opt.seed;
        cfg.population.seed = *opt.seed;
        cfg.paths.seed = *opt.seed;
    }
    if (opt.n_paths) cfg.paths.n_paths = *opt.n_paths;
    return cfg;
}

inline io::RunManifest manifest_for(const config::RunConfig& cfg, const std::string& command) {
    io::RunManifest m;
    m.command = command;
    m.config_hash = io::fnv1a64(config::canonical_text(cfg));
    m.seed = cfg.seed;
    m.version = version;
    return m;
}

inline std::filesystem::path prepare_out_dir(const Options& opt) {
    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline GridAxis axis_or(const std::map<std::string, GridAxis>& axes, const std::string& name,
                        const GridAxis& fallback,
                        const std::vector<std::string>& known) {
    for (const auto& [k, ax] : axes) {
        bool ok = false;
        for (const auto& kn : known) ok = ok || kn == k;
        if (!ok) throw ConfigError("grid spec: axis '" + k + "' not used by this command");
    }
    const auto it = axes.find(name);
    return it == axes.end() ? fallback : it->second;
}

// Swap in the agent's optimal subsidy (if requested): the model re-derives
// with cost (1 - m*) K.  Returns the applied rate.
inline double maybe_subsidize(params::ModelParams& p, params::DerivedConstants& d,
                              const config::RunConfig& cfg, bool subsidized) {
    if (!subsidized) return 0.0;
    const double z0 = p.agent.w0 + d.H;
    const auto res = subsidy::optimal_subsidy(p, d, cfg.planner, z0);
    p = subsidy::subsidized_params(p, res.m_star);
    d = params::derive_constants(p);
    return res.m_star;
}

} // namespace detail

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

inline int run_validate(const config::RunConfig& cfg0, const Options& opt,
                        std::ostream& os = std::cout) {
    const auto cfg = detail::resolve(cfg0, opt);
    const auto report = params::validate(cfg.model);
    for (const auto& c : report.checks) {
        os << (c.pass ? "[ ok ] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << " (margin " << io::format_double(c.margin) << ")\n";
    }
    if (!report.ok) {
        os << "validation failed\n";
        return 3;
    }
    const auto d = params::derive_constants(cfg.model);
    os << "validation passed; retrofit premium " << io::format_double(d.theta)
       << " EUR, regime " << regime_name(d.theta_regime);
    if (d.waiting())
        os << ", investment threshold " << io::format_double(d.w_star) << " EUR";
    os << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

inline int run_solve(const config::RunConfig& cfg0, const Options& opt,
                     std::ostream& os = std::cout) {
    const auto cfg = detail::resolve(cfg0, opt);
    auto p = cfg.model;
    auto d = params::derive_constants(p);
    const double m_applied = detail::maybe_subsidize(p, d, cfg, opt.subsidized);

    const auto dir = detail::prepare_out_dir(opt);
    auto man = detail::manifest_for(cfg, "solve");

    {
        io::CsvWriter csv(dir / "solve_constants.csv", man, {"name", "value"});
        const auto put = [&](const char* n, double v) { csv.row({std::string(n), v}); };
        put("kappa_mpr", d.kappa_mpr);
        put("delta_hat", d.delta_hat);
        put("phi", d.phi);
        put("Gamma", d.Gamma);
        put("Gamma_hat", d.Gamma_hat);
        put("H", d.H);
        put("H_tilde", d.H_tilde);
        put("theta", d.theta);
        put("mu_Z", d.mu_Z);
        put("sigma_Z", d.sigma_Z);
        put("a0", d.a0);
        put("kappa_Q", d.kappa_Q);
        put("B0", d.B0);
        put("B1", d.B1);
        put("P_ann", d.P_ann);
        csv.row({std::string("regime"), std::string(regime_name(d.theta_regime))});
        if (d.waiting()) {
            put("Lambda", d.Lambda);
            put("z_star", d.z_star);
            put("w_star", d.w_star);
            put("m_bar", d.m_bar);
            put("A0_dual", d.A0_dual);
            put("log_z_hat_star", d.log_z_hat_star);
        }
        if (opt.subsidized) put("subsidy_m_star", m_applied);
        man.outputs.push_back("solve_constants.csv");
    }

    GridAxis def;
    if (d.waiting()) {
        def.lo = d.w_star * 1.2 / 240.0;
        def.hi = d.w_star * 1.2;
        def.n = 240;
    } else {
        def.lo = p.agent.w0 / 100.0;
        def.hi = 2.0 * p.agent.w0;
        def.n = 200;
    }
    const auto ax = detail::axis_or(parse_grid(opt.grid_spec), "w", def, {"w"});
    {
        io::CsvWriter csv(dir / "solve_grid.csv", man,
                          {"w", "z", "regime", "F", "F_hat", "G", "a", "x", "s", "c"});
        for (double w : axis_values(ax)) {
            const auto vp = solution::value_point(p, d, w);
            const auto ctl = solution::optimal_controls(p, d, w, vp.regime);
            csv.row({w, w + d.H, std::string(regime_name(vp.regime)), vp.F,
                     solution::counterfactual_value(p, d, w), solution::terminal_gain(p, d, w),
                     w == 0.0 ? 0.0 : ctl.a, ctl.x, ctl.s, ctl.c});
        }
        man.outputs.push_back("solve_grid.csv");
    }
    io::write_manifest(dir, man);
    os << "wrote " << (dir / "solve_grid.csv").string() << " (" << ax.n << " rows)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

inline int run_simulate(const config::RunConfig& cfg0, const Options& opt,
                        std::ostream& os = std::cout) {
    auto cfg = detail::resolve(cfg0, opt);
    if (!opt.n_paths) cfg.paths.n_paths = std::min<std::uint64_t>(cfg.paths.n_paths, 10);
    auto p = cfg.model;
    auto d = params::derive_constants(p);
    detail::maybe_subsidize(p, d, cfg, opt.subsidized);

    const auto dir = detail::prepare_out_dir(opt);
    auto man = detail::manifest_for(cfg, "simulate");
    io::CsvWriter csv(dir / "trajectories.csv", man,
                      {"path", "t", "W", "Z", "a", "x", "s", "c", "regime", "R", "Q",
                       "c_per_m2"});
    for (std::uint64_t i = 0; i < cfg.paths.n_paths; ++i) {
        const auto tr = stochastic::simulate_trajectory(p, d, cfg.paths, i);
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            csv.row({static_cast<std::int64_t>(i), tr.times[k], tr.W[k], tr.Z[k], tr.a[k],
                     tr.x[k], tr.s[k], tr.c[k], std::string(regime_name(tr.regime[k])), tr.R[k],
                     tr.Q[k], tr.c[k] / p.retrofit.A});
        }
    }
    man.outputs.push_back("trajectories.csv");
    io::write_manifest(dir, man);
    os << "wrote " << (dir / "trajectories.csv").string() << " (" << cfg.paths.n_paths
       << " paths)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// welfare
// ---------------------------------------------------------------------------

inline int run_welfare(const config::RunConfig& cfg0, const Options& opt,
                       std::ostream& os = std::cout) {
    const auto cfg = detail::resolve(cfg0, opt);
    const auto& p = cfg.model;
    const auto d = params::derive_constants(p);
    const auto axes = parse_grid(opt.grid_spec);
    const GridAxis def_w{5000.0, d.waiting() ? 1.4 * d.w_star : 4.0 * p.agent.w0, 20};
    const GridAxis def_c{10.0, 70.0, 20};
    const auto ax_w = detail::axis_or(axes, "w", def_w, {"w", "carbon"});
    const auto ax_c = detail::axis_or(axes, "carbon", def_c, {"w", "carbon"});

    const auto dir = detail::prepare_out_dir(opt);
    auto man = detail::manifest_for(cfg, "welfare");
    io::CsvWriter csv(dir / "welfare.csv", man,
                      {"w", "carbon_price", "V_sc", "V_ev", "V_total", "regime"});
    std::int64_t rows = 0;
    for (double w : axis_values(ax_w)) {
        for (double c : axis_values(ax_c)) {
            auto sp = cfg.social;
            sp.carbon_price = c;
            const auto rep = welfare::total_welfare(p, d, sp, w);
            csv.row({w, c, rep.V_sc, rep.V_ev, rep.V_total,
                     std::string(regime_name(rep.regime))});
            ++rows;
        }
    }
    man.outputs.push_back("welfare.csv");
    io::write_manifest(dir, man);
    os << "wrote " << (dir / "welfare.csv").string() << " (" << rows << " rows)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// subsidy
// ---------------------------------------------------------------------------

inline int run_subsidy(const config::RunConfig& cfg0, const Options& opt,
                       std::ostream& os = std::cout) {
    const auto cfg = detail::resolve(cfg0, opt);
    const auto& p = cfg.model;
    const auto d = params::derive_constants(p);
    const auto axes = parse_grid(opt.grid_spec);
    const GridAxis def_w{45000.0, d.waiting() ? 0.9 * d.w_star : 4.0 * p.agent.w0, 10};
    const GridAxis def_c{10.0, 70.0, 7};
    const auto ax_w = detail::axis_or(axes, "w", def_w, {"w", "carbon"});
    const auto ax_c = detail::axis_or(axes, "carbon", def_c, {"w", "carbon"});

    const auto dir = detail::prepare_out_dir(opt);
    auto man = detail::manifest_for(cfg, "subsidy");
    io::CsvWriter csv(dir / "subsidy.csv", man,
                      {"w", "carbon_price", "m_star", "J_star", "regime", "boundary_hit"});
    std::int64_t rows = 0;
    for (double w : axis_values(ax_w)) {
        for (double c : axis_values(ax_c)) {
            auto pl = cfg.planner;
            pl.social.carbon_price = c;
            const auto res = subsidy::optimal_subsidy(p, d, pl, w + d.H);
            csv.row({w, c, res.m_star, res.J_star, std::string(regime_name(res.regime)),
                     static_cast<std::int64_t>(res.boundary_hit ? 1 : 0)});
            ++rows;
        }
    }
    man.outputs.push_back("subsidy.csv");
    io::write_manifest(dir, man);
    os << "wrote " << (dir / "subsidy.csv").string() << " (" << rows << " rows)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// diffuse
// ---------------------------------------------------------------------------

inline int run_diffuse(const config::RunConfig& cfg0, const Options& opt,
                       std::ostream& os = std::cout) {
    const auto cfg = detail::resolve(cfg0, opt);
    const auto pop = aggregate::sample_population(cfg.model, cfg.population);
    std::vector<double> m_star;
    const auto pop_sub = aggregate::apply_subsidy_policy(pop, cfg.planner, &m_star);
    const auto low = aggregate::apply_volatility_scenario(pop, 0.9);
    const auto high = aggregate::apply_volatility_scenario(pop, 1.1);

    const auto dir = detail::prepare_out_dir(opt);
    auto man = detail::manifest_for(cfg, "diffuse");

    {
        io::CsvWriter csv(dir / "population.csv", man,
                          {"agent", "w0", "Y", "beta", "gamma", "delta", "lambda", "x_sub",
                           "s_sub", "z0", "theta", "z_star", "w_star", "regime0", "m_star"});
        for (std::size_t i = 0; i < pop.agents.size(); ++i) {
            const auto& a = pop.agents[i];
            csv.row({static_cast<std::int64_t>(i), a.model.agent.w0, a.model.agent.Y,
                     a.model.agent.beta, a.model.agent.gamma, a.model.agent.delta,
                     a.model.agent.lambda_, a.model.agent.x_sub, a.model.agent.s_sub, a.z0,
                     a.derived.theta, a.derived.z_star, a.derived.w_star,
                     std::string(regime_name(a.regime0)), m_star[i]});
        }
        man.outputs.push_back("population.csv");
    }

    const auto ax_t = detail::axis_or(parse_grid(opt.grid_spec), "t", {0.0, 25.0, 26}, {"t"});
    const auto times = axis_values(ax_t);
    {
        io::CsvWriter csv(dir / "adoption.csv", man,
                          {"t", "E_S", "rate", "E_C", "E_S_subsidized", "E_C_subsidized"});
        for (double t : times) {
            csv.row({t, aggregate::expected_adoption_share(pop, t),
                     aggregate::adoption_rate(pop, t),
                     aggregate::expected_total_consumption(pop, t),
                     aggregate::expected_adoption_share(pop_sub, t),
                     aggregate::expected_total_consumption(pop_sub, t)});
        }
        man.outputs.push_back("adoption.csv");
    }
    {
        io::CsvWriter csv(dir / "volatility.csv", man,
                          {"t", "E_S_low", "E_S_base", "E_S_high", "E_C_low", "E_C_base",
                           "E_C_high"});
        for (double t : times) {
            csv.row({t, aggregate::expected_adoption_share(low.pop, t),
                     aggregate::expected_adoption_share(pop, t),
                     aggregate::expected_adoption_share(high.pop, t),
                     aggregate::expected_total_consumption(low.pop, t),
                     aggregate::expected_total_consumption(pop, t),
                     aggregate::expected_total_consumption(high.pop, t)});
        }
        man.outputs.push_back("volatility.csv");
    }
    io::write_manifest(dir, man);
    os << "population of " << pop.agents.size() << " agents, immediate share "
       << io::format_double(pop.immediate_share) << " (subsidised "
       << io::format_double(pop_sub.immediate_share) << ")\n";
    os << "volatility scenarios: patience violations " << low.patience_violations
       << " (low), " << high.patience_violations << " (high)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// statics
// ---------------------------------------------------------------------------

inline int run_statics(const config::RunConfig& cfg0, const Options& opt,
                       std::ostream& os = std::cout) {
    const auto cfg = detail::resolve(cfg0, opt);
    const auto table = analysis::elasticity_table(cfg.model, cfg.planner);
    const auto dir = detail::prepare_out_dir(opt);
    auto man = detail::manifest_for(cfg, "statics");
    io::CsvWriter csv(dir / "elasticities.csv", man, {"param", "target", "value", "method"});
    for (const auto& e : table) csv.row({e.param, e.target, e.value, e.method});
    man.outputs.push_back("elasticities.csv");
    io::write_manifest(dir, man);
    os << "wrote " << (dir / "elasticities.csv").string() << " (" << table.size()
       << " rows)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// depth
// ---------------------------------------------------------------------------

inline int run_depth(const config::RunConfig& cfg0, const Options& opt,
                     std::ostream& os = std::cout) {
    const auto cfg = detail::resolve(cfg0, opt);
    const auto study =
        analysis::retrofit_depth(cfg.model, cfg.depth_K_min, cfg.depth_menu, cfg.social);
    const auto dir = detail::prepare_out_dir(opt);
    auto man = detail::manifest_for(cfg, "depth");
    {
        io::CsvWriter csv(dir / "depth.csv", man, {"K", "eta_tilde", "F", "V"});
        for (std::size_t i = 0; i < study.grid_K.size(); ++i)
            csv.row({study.grid_K[i], study.fit(study.grid_K[i] - study.K_min), study.grid_F[i],
                     study.grid_V[i]});
        man.outputs.push_back("depth.csv");
    }
    {
        io::CsvWriter csv(dir / "depth_summary.csv", man,
                          {"K_star_F", "K_star_V", "L", "k", "x0", "fit_ok", "max_rel_err"});
        csv.row({study.K_star_F, study.K_star_V, study.fit.L, study.fit.k, study.fit.x0,
                 static_cast<std::int64_t>(study.fit.ok ? 1 : 0), study.fit.max_rel_err});
        man.outputs.push_back("depth_summary.csv");
    }
    io::write_manifest(dir, man);
    os << "optimal depth: K = " << io::format_double(study.K_star_F)
       << " EUR by household value, K = " << io::format_double(study.K_star_V)
       << " EUR by total welfare\n";
    return 0;
}

} // namespace retrofit::cli
