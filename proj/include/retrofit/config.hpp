// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "retrofit/aggregate.hpp"
#include "retrofit/analysis.hpp"
#include "retrofit/common.hpp"
#include "retrofit/params.hpp"
#include "retrofit/stochastic.hpp"
#include "retrofit/subsidy.hpp"
#include "retrofit/welfare.hpp"

// Flat key = value configuration.
//
//   # comment
//   gamma = 4.0
//   [overrides]        # optional section: replaces earlier values
//   gamma = 3.5
//
// Duplicate keys within a section are an error; keys in [overrides] replace
// base values.  Unknown keys are an error (they are always typos).  Every
// key is optional: defaults reproduce the shipped case study.

namespace retrofit::config {

// ---------------------------------------------------------------------------
// Raw parsing
// ---------------------------------------------------------------------------

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Parse the text into a resolved key -> value map.
inline std::map<std::string, std::string> parse_text(const std::string& text) {
    std::map<std::string, std::string> base, over;
    bool in_overrides = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line == "[overrides]") {
                in_overrides = true;
                continue;
            }
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown section " +
                              line + " (only [overrides] is recognised)");
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        auto& section = in_overrides ? over : base;
        if (!section.emplace(key, val).second)
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
    }
    for (const auto& [k, v] : over) base[k] = v;
    return base;
}

inline std::map<std::string, std::string> parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

// ---------------------------------------------------------------------------
// Typed run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    params::ModelParams model{
        // case-study center: German single-family-home retrofit
        {0.025, 0.07, 0.2, 0.21},                                    // market
        {0.007, 4.0, 0.03, 0.02, 12000.0, 15.0, 47000.0, 45000.0},   // agent
        {0.005, 0.025, 0.04, 120000.0, 157.0},                       // retrofit
        {8720.0},                                                    // unit conventions
    };
    welfare::SocialParams social{0.02, 0.013, 0.05, 45.0, 0.240e-3};
    subsidy::PlannerParams planner{2.12, 1e-3, social};
    aggregate::PopulationSpec population{};
    stochastic::PathSpec paths{};
    aggregate::ShockMode shock_mode = aggregate::ShockMode::common;
    double depth_K_min = 57000.0;
    std::vector<analysis::DepthPoint> depth_menu{
        {63000.0, 0.025}, {68000.0, 0.030}, {80000.0, 0.039}};
    std::uint64_t seed = 20260816;
};

namespace detail {

inline double as_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
    }
    if (used != v.size())
        throw ConfigError("config key '" + key + "': trailing characters in '" + v + "'");
    return out;
}

inline std::uint64_t as_u64(const std::string& key, const std::string& v) {
    // stoull accepts and wraps a leading minus; reject it up front
    if (v.find('-') != std::string::npos)
        throw ConfigError("config key '" + key + "': not a non-negative integer: '" + v + "'");
    std::size_t used = 0;
    unsigned long long out;
    try {
        out = std::stoull(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a non-negative integer: '" + v + "'");
    }
    if (used != v.size())
        throw ConfigError("config key '" + key + "': trailing characters in '" + v + "'");
    return out;
}

inline bool as_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

// "63000:0.025, 68000:0.030" -> depth points
inline std::vector<analysis::DepthPoint> as_menu(const std::string& key, const std::string& v) {
    std::vector<analysis::DepthPoint> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("config key '" + key + "': expected cost:efficiency pairs");
        out.push_back({as_double(key, trim(item.substr(0, colon))),
                       as_double(key, trim(item.substr(colon + 1)))});
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty menu");
    return out;
}

} // namespace detail

// Apply a resolved key -> value map onto the defaults.  Unknown keys throw.
inline RunConfig make_run_config(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    for (const auto& [key, val] : kv) {
        auto& m = c.model;
        if (key == "mu_R") m.market.mu_R = detail::as_double(key, val);
        else if (key == "mu_S") m.market.mu_S = detail::as_double(key, val);
        else if (key == "sigma_S") m.market.sigma_S = detail::as_double(key, val);
        else if (key == "P") m.market.P = detail::as_double(key, val);
        else if (key == "beta") m.agent.beta = detail::as_double(key, val);
        else if (key == "gamma") m.agent.gamma = detail::as_double(key, val);
        else if (key == "delta") m.agent.delta = detail::as_double(key, val);
        else if (key == "lambda") m.agent.lambda_ = detail::as_double(key, val);
        else if (key == "x_sub") m.agent.x_sub = detail::as_double(key, val);
        else if (key == "s_sub") m.agent.s_sub = detail::as_double(key, val);
        else if (key == "Y") m.agent.Y = detail::as_double(key, val);
        else if (key == "w" || key == "w0") m.agent.w0 = detail::as_double(key, val);
        else if (key == "eta") m.retrofit.eta = detail::as_double(key, val);
        else if (key == "eta_tilde") m.retrofit.eta_tilde = detail::as_double(key, val);
        else if (key == "rho") m.retrofit.rho = detail::as_double(key, val);
        else if (key == "K") m.retrofit.K = detail::as_double(key, val);
        else if (key == "A") m.retrofit.A = detail::as_double(key, val);
        else if (key == "hours_per_year") m.units.hours_per_year = detail::as_double(key, val);
        else if (key == "epsilon") c.social.epsilon = detail::as_double(key, val);
        else if (key == "mu_varpi") c.social.mu_varpi = detail::as_double(key, val);
        else if (key == "sigma_varpi") c.social.sigma_varpi = detail::as_double(key, val);
        else if (key == "carbon_price") c.social.carbon_price = detail::as_double(key, val);
        else if (key == "emissions_factor") c.social.emissions_factor = detail::as_double(key, val);
        else if (key == "xi0") c.planner.xi0 = detail::as_double(key, val);
        else if (key == "xi1") c.planner.xi1 = detail::as_double(key, val);
        else if (key == "N") c.population.N = detail::as_u64(key, val);
        else if (key == "idiosyncratic_width")
            c.population.idiosyncratic_width = detail::as_double(key, val);
        else if (key == "median_w") c.population.wealth_income.median_w = detail::as_double(key, val);
        else if (key == "mean_w") c.population.wealth_income.mean_w = detail::as_double(key, val);
        else if (key == "median_Y") c.population.wealth_income.median_Y = detail::as_double(key, val);
        else if (key == "mean_Y") c.population.wealth_income.mean_Y = detail::as_double(key, val);
        else if (key == "loglog_slope")
            c.population.wealth_income.loglog_slope = detail::as_double(key, val);
        else if (key == "seed") c.seed = detail::as_u64(key, val);
        else if (key == "n_paths") c.paths.n_paths = detail::as_u64(key, val);
        else if (key == "dt") c.paths.dt = detail::as_double(key, val);
        else if (key == "horizon") c.paths.horizon = detail::as_double(key, val);
        else if (key == "antithetic") c.paths.antithetic = detail::as_bool(key, val);
        else if (key == "bridge_correction")
            c.paths.bridge_correction = detail::as_bool(key, val);
        else if (key == "shock_mode") {
            if (val == "common") c.shock_mode = aggregate::ShockMode::common;
            else if (val == "independent") c.shock_mode = aggregate::ShockMode::independent;
            else throw ConfigError("config key 'shock_mode': expected common or independent");
        } else if (key == "depth_K_min") c.depth_K_min = detail::as_double(key, val);
        else if (key == "depth_menu") c.depth_menu = detail::as_menu(key, val);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    if (c.paths.dt <= 0.0) throw ConfigError("config key 'dt': must be positive");
    if (c.paths.horizon < 0.0) throw ConfigError("config key 'horizon': must be non-negative");
    c.planner.social = c.social;
    c.population.seed = c.seed;
    c.paths.seed = c.seed;
    return c;
}

inline RunConfig load(const std::string& path) { return make_run_config(parse_file(path)); }

// Canonical text of the resolved configuration, for hashing into manifests.
inline std::string canonical_text(const RunConfig& c) {
    std::ostringstream out;
    out.precision(17);
    const auto& m = c.model;
    out << "A=" << m.retrofit.A << "\nK=" << m.retrofit.K << "\nN=" << c.population.N
        << "\nP=" << m.market.P << "\nY=" << m.agent.Y
        << "\nantithetic=" << (c.paths.antithetic ? 1 : 0) << "\nbeta=" << m.agent.beta
        << "\nbridge_correction=" << (c.paths.bridge_correction ? 1 : 0)
        << "\ncarbon_price=" << c.social.carbon_price << "\ndelta=" << m.agent.delta
        << "\ndepth_K_min=" << c.depth_K_min << "\ndepth_menu=";
    for (std::size_t i = 0; i < c.depth_menu.size(); ++i)
        out << (i ? "," : "") << c.depth_menu[i].K_ee << ":" << c.depth_menu[i].eta_tilde;
    out << "\ndt=" << c.paths.dt << "\nemissions_factor=" << c.social.emissions_factor
        << "\nepsilon=" << c.social.epsilon << "\neta=" << m.retrofit.eta
        << "\neta_tilde=" << m.retrofit.eta_tilde << "\ngamma=" << m.agent.gamma
        << "\nhorizon=" << c.paths.horizon << "\nhours_per_year=" << m.units.hours_per_year
        << "\nidiosyncratic_width=" << c.population.idiosyncratic_width
        << "\nlambda=" << m.agent.lambda_ << "\nloglog_slope="
        << c.population.wealth_income.loglog_slope << "\nmean_Y="
        << c.population.wealth_income.mean_Y << "\nmean_w=" << c.population.wealth_income.mean_w
        << "\nmedian_Y=" << c.population.wealth_income.median_Y
        << "\nmedian_w=" << c.population.wealth_income.median_w
        << "\nmu_R=" << m.market.mu_R << "\nmu_S=" << m.market.mu_S
        << "\nmu_varpi=" << c.social.mu_varpi << "\nn_paths=" << c.paths.n_paths
        << "\nrho=" << m.retrofit.rho << "\ns_sub=" << m.agent.s_sub
        << "\nseed=" << c.seed << "\nshock_mode="
        << (c.shock_mode == aggregate::ShockMode::common ? "common" : "independent")
        << "\nsigma_S=" << m.market.sigma_S << "\nsigma_varpi=" << c.social.sigma_varpi
        << "\nw=" << m.agent.w0 << "\nx_sub=" << m.agent.x_sub << "\nxi0=" << c.planner.xi0
        << "\nxi1=" << c.planner.xi1 << "\n";
    return out.str();
}

} // namespace retrofit::config
