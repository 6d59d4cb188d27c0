// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "retrofit/common.hpp"
#include "retrofit/hitting.hpp"
#include "retrofit/params.hpp"
#include "retrofit/rng.hpp"
#include "retrofit/stochastic.hpp"
#include "retrofit/subsidy.hpp"

// Population-level technology diffusion.
//
// A population of heterogeneous agents is drawn around the case-study
// centers: preference and subsistence parameters uniformly within a relative
// width, income and wealth jointly lognormal (calibrated from medians, means
// and a log-log slope).  Each agent solves the same stopping problem; the
// population aggregates are
//     E[S_t]  expected adoption share: immediate adopters plus the hitting
//             probabilities of the waiting agents,
//     rate_t  adoption rate: mean hitting density across waiting agents,
//     E[C_t]  expected aggregate fuel consumption, kWh/year,
// all computed in closed form per agent.  The expected fuel of a waiting
// agent splits exactly at the stopping time via the strong Markov property:
//     E[Z_t 1{tau > t}] = z e^(mu_Z t) - z_star I_mu(t),
//     E[Z_tilde_t 1{tau <= t}] = (z_star + theta) I_mu(t),
// where I_mu is the hitting-density growth integral, so no conditional-mean
// approximation enters.

namespace retrofit::aggregate {

using params::DerivedConstants;
using params::ModelParams;

// ---------------------------------------------------------------------------
// Wealth-income calibration
// ---------------------------------------------------------------------------

struct WealthIncomeModel {
    double median_w; // EUR
    double mean_w;   // EUR, > median (lognormal right skew)
    double median_Y; // EUR/year
    double mean_Y;   // EUR/year, > median
    double loglog_slope; // elasticity of wealth with respect to income
};

struct WealthIncomeCalibration {
    double mu_lY, sd_lY; // ln Y ~ N(mu_lY, sd_lY^2)
    double mu_lw, sd_lw; // marginal law of ln w
    double slope;        // ln w = mu_lw + slope (ln Y - mu_lY) + resid
    double resid_sd;     // conditional residual (law of total variance)
};

inline WealthIncomeCalibration calibrate_wealth_income(const WealthIncomeModel& m) {
    if (m.median_w <= 0.0 || m.median_Y <= 0.0)
        throw ConfigError("wealth-income calibration: medians must be positive");
    if (m.mean_w <= m.median_w || m.mean_Y <= m.median_Y)
        throw ConfigError("wealth-income calibration: lognormal means must exceed medians");
    WealthIncomeCalibration c;
    c.mu_lY = std::log(m.median_Y);
    c.sd_lY = std::sqrt(2.0 * std::log(m.mean_Y / m.median_Y));
    c.mu_lw = std::log(m.median_w);
    c.sd_lw = std::sqrt(2.0 * std::log(m.mean_w / m.median_w));
    c.slope = m.loglog_slope;
    const double resid_var = c.sd_lw * c.sd_lw - c.slope * c.slope * c.sd_lY * c.sd_lY;
    if (resid_var < 0.0)
        throw ConfigError("wealth-income calibration: slope too steep for the marginal "
                          "wealth dispersion (negative residual variance)");
    c.resid_sd = std::sqrt(resid_var);
    return c;
}

// ---------------------------------------------------------------------------
// Population sampling
// ---------------------------------------------------------------------------

struct PopulationSpec {
    std::uint64_t N = 10000;
    double idiosyncratic_width = 0.10; // relative half-width of the uniform draws
    WealthIncomeModel wealth_income{45000.0, 90000.0, 47000.0, 55000.0, 0.6};
    std::uint64_t seed = 1;
};

struct AgentRecord {
    ModelParams model;
    DerivedConstants derived;
    double z0;      // initial disposable capital, EUR
    Regime regime0; // ImmediateInvest or Waiting at t = 0
};

struct Population {
    std::vector<AgentRecord> agents;
    double immediate_share = 0.0; // fraction investing at t = 0
};

inline double recompute_immediate_share(const Population& pop) {
    std::uint64_t n = 0;
    for (const auto& a : pop.agents)
        if (a.regime0 == Regime::ImmediateInvest) ++n;
    return pop.agents.empty() ? 0.0
                              : static_cast<double>(n) / static_cast<double>(pop.agents.size());
}

// Draw a population around the base parameters.  Preferences and subsistence
// levels are uniform within +-width of their centers; technology and
// financing are common; (income, wealth) are joint lognormal.  Invalid draws
// (any failed validation check, e.g. impatience) are rejected and resampled,
// capped at 100 N attempts.  Fully deterministic in the seed: attempt k
// draws from stream k.
inline Population sample_population(const ModelParams& base, const PopulationSpec& spec) {
    const auto cal = calibrate_wealth_income(spec.wealth_income);
    const double width = spec.idiosyncratic_width;
    if (width < 0.0 || width >= 1.0)
        throw ConfigError("sample_population: idiosyncratic width must lie in [0, 1)");

    Population pop;
    pop.agents.reserve(spec.N);
    const std::uint64_t max_attempts = 100 * spec.N;
    std::uint64_t attempt = 0;
    while (pop.agents.size() < spec.N) {
        if (attempt >= max_attempts)
            throw NumericError("sample_population: rejection cap of 100 N attempts exceeded "
                               "(parameter ranges produce too many invalid agents)");
        rng::CounterRng g(spec.seed, attempt++);
        const auto jitter = [&](double center) {
            return center * (1.0 + width * (2.0 * g.u01() - 1.0));
        };
        ModelParams m = base;
        m.agent.beta = jitter(base.agent.beta);
        m.agent.gamma = jitter(base.agent.gamma);
        m.agent.delta = jitter(base.agent.delta);
        m.agent.lambda_ = jitter(base.agent.lambda_);
        m.agent.x_sub = jitter(base.agent.x_sub);
        m.agent.s_sub = jitter(base.agent.s_sub);
        const double lY = cal.mu_lY + cal.sd_lY * g.normal();
        const double lw = cal.mu_lw + cal.slope * (lY - cal.mu_lY) + cal.resid_sd * g.normal();
        m.agent.Y = std::exp(lY);
        m.agent.w0 = std::exp(lw);

        if (!params::validate(m).ok) continue;
        AgentRecord rec;
        rec.model = m;
        try {
            rec.derived = params::derive_constants(m);
        } catch (const DomainError&) {
            continue;
        }
        rec.z0 = m.agent.w0 + rec.derived.H;
        if (rec.z0 <= 0.0) continue;
        rec.regime0 = params::regime_at(rec.derived, rec.z0);
        pop.agents.push_back(std::move(rec));
    }
    pop.immediate_share = recompute_immediate_share(pop);
    return pop;
}

// Deterministic subsample (stride selection) for Monte Carlo cross-checks.
inline Population make_subsample(const Population& pop, std::uint64_t n) {
    if (n == 0 || pop.agents.empty()) throw ConfigError("make_subsample: empty selection");
    Population out;
    const std::uint64_t stride = std::max<std::uint64_t>(1, pop.agents.size() / n);
    for (std::size_t i = 0; i < pop.agents.size() && out.agents.size() < n; i += stride)
        out.agents.push_back(pop.agents[i]);
    out.immediate_share = recompute_immediate_share(out);
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form aggregates
// ---------------------------------------------------------------------------

// E[S_t]: expected adoption share at time t.
inline double expected_adoption_share(const Population& pop, double t) {
    double acc = 0.0;
    for (const auto& a : pop.agents) {
        acc += a.regime0 == Regime::ImmediateInvest
                   ? 1.0
                   : hitting::cdf(a.z0, a.derived.z_star, a.derived.mu_Z, a.derived.sigma_Z, t);
    }
    return acc / static_cast<double>(pop.agents.size());
}

// d E[S_t] / dt: mean hitting density across the waiting agents.
inline double adoption_rate(const Population& pop, double t) {
    double acc = 0.0;
    for (const auto& a : pop.agents) {
        if (a.regime0 == Regime::Waiting)
            acc += hitting::pdf(a.z0, a.derived.z_star, a.derived.mu_Z, a.derived.sigma_Z, t);
    }
    return acc / static_cast<double>(pop.agents.size());
}

// Expected fuel draw of one agent at time t, in watts.
inline double expected_fuel(const AgentRecord& a, double t) {
    const auto& p = a.model;
    const auto& d = a.derived;
    const double coef = p.agent.beta * d.phi / d.P_ann;
    if (a.regime0 == Regime::ImmediateInvest) {
        return p.agent.s_sub / p.retrofit.eta_tilde +
               coef * (a.z0 + d.theta) * std::exp(d.mu_Z * t);
    }
    const double cdf = hitting::cdf(a.z0, d.z_star, d.mu_Z, d.sigma_Z, t);
    const double I_mu = hitting::growth_integral(a.z0, d.z_star, d.mu_Z, d.sigma_Z, d.mu_Z, t);
    const double pre = p.agent.s_sub / p.retrofit.eta * (1.0 - cdf) +
                       coef * (a.z0 * std::exp(d.mu_Z * t) - d.z_star * I_mu);
    const double post = p.agent.s_sub / p.retrofit.eta_tilde * cdf +
                        coef * (d.z_star + d.theta) * I_mu;
    return pre + post;
}

// E[C_t]: expected aggregate fuel consumption of the population, kWh/year.
inline double expected_total_consumption(const Population& pop, double t) {
    double watts = 0.0;
    for (const auto& a : pop.agents) watts += expected_fuel(a, t);
    // all agents share the unit conventions of their (common) base model
    const double hours = pop.agents.front().model.units.hours_per_year;
    return watts * hours * params::UnitConventions::watt_to_kilowatt;
}

// ---------------------------------------------------------------------------
// Subsidy pass and scenarios
// ---------------------------------------------------------------------------

// Apply the planner's optimal per-agent subsidy to every waiting agent: the
// agent's cost becomes (1 - m*) K and all constants re-derive (Stackelberg
// consistency).  Immediate adopters are left untouched (no penalty is
// levied).  When m_out is non-null it receives one rate per agent, zero for
// the untouched immediate adopters.
inline Population apply_subsidy_policy(const Population& pop,
                                       const subsidy::PlannerParams& planner,
                                       std::vector<double>* m_out = nullptr) {
    Population out;
    out.agents.reserve(pop.agents.size());
    if (m_out) {
        m_out->clear();
        m_out->reserve(pop.agents.size());
    }
    for (const auto& a : pop.agents) {
        if (a.regime0 != Regime::Waiting) {
            out.agents.push_back(a);
            if (m_out) m_out->push_back(0.0);
            continue;
        }
        const auto res = subsidy::optimal_subsidy_waiting(a.model, a.derived, planner, a.z0);
        if (m_out) m_out->push_back(res.m_star);
        AgentRecord rec;
        rec.model = subsidy::subsidized_params(a.model, res.m_star);
        rec.derived = params::derive_constants(rec.model);
        rec.z0 = rec.model.agent.w0 + rec.derived.H;
        rec.regime0 = params::regime_at(rec.derived, rec.z0);
        out.agents.push_back(std::move(rec));
    }
    out.immediate_share = recompute_immediate_share(out);
    return out;
}

// Market-volatility scenario: rescale sigma_S for every agent and re-derive.
// Agents violating the patience condition under the new volatility are
// counted, not dropped: the first-passage law remains valid with negative
// log-drift (the threshold is then reached with probability < 1).
struct ScenarioPopulation {
    Population pop;
    std::uint64_t patience_violations = 0;
};

inline ScenarioPopulation apply_volatility_scenario(const Population& pop, double sigma_scale) {
    if (sigma_scale <= 0.0) throw ConfigError("volatility scenario: scale must be positive");
    ScenarioPopulation out;
    out.pop.agents.reserve(pop.agents.size());
    for (const auto& a : pop.agents) {
        AgentRecord rec;
        rec.model = a.model;
        rec.model.market.sigma_S = a.model.market.sigma_S * sigma_scale;
        rec.derived = params::derive_constants(rec.model);
        if (rec.derived.mu_Z - 0.5 * rec.derived.sigma_Z * rec.derived.sigma_Z <= 0.0)
            ++out.patience_violations;
        rec.z0 = rec.model.agent.w0 + rec.derived.H;
        rec.regime0 = params::regime_at(rec.derived, rec.z0);
        out.pop.agents.push_back(std::move(rec));
    }
    out.pop.immediate_share = recompute_immediate_share(out.pop);
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo cross-check
// ---------------------------------------------------------------------------

enum class ShockMode { common, independent };

struct ConsumptionCurve {
    std::vector<double> mean; // kWh/year at the requested times
    std::vector<double> se;   // standard error across replications
};

// Simulated aggregate consumption.  One replication simulates every agent
// over the horizon and records total fuel at the requested times; the mean
// and standard error are taken across `spec.n_paths` replications.  In
// common mode all agents share one market shock sequence per replication
// (one risky asset); in independent mode each (agent, replication) pair has
// its own stream.
inline ConsumptionCurve mc_consumption(const Population& pop, const stochastic::PathSpec& spec,
                                       ShockMode mode, const std::vector<double>& times) {
    double horizon = spec.horizon;
    for (double t : times) horizon = std::max(horizon, t);
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / spec.dt));
    std::vector<std::size_t> time_idx;
    for (double t : times)
        time_idx.push_back(static_cast<std::size_t>(std::llround(t / spec.dt)));

    const double hours = pop.agents.front().model.units.hours_per_year;
    const double to_kwh = hours * params::UnitConventions::watt_to_kilowatt;
    const std::uint64_t n_rep = spec.n_paths;
    std::vector<std::vector<double>> rep_curves(times.size());
    for (auto& v : rep_curves) v.reserve(n_rep);

    std::vector<double> shocks(n_steps);
    for (std::uint64_t r = 0; r < n_rep; ++r) {
        if (mode == ShockMode::common) {
            rng::CounterRng g(spec.seed, r);
            for (auto& s : shocks) s = g.normal();
        }
        std::vector<double> totals(times.size(), 0.0);
        for (std::size_t ai = 0; ai < pop.agents.size(); ++ai) {
            const auto& a = pop.agents[ai];
            const auto& p = a.model;
            const auto& d = a.derived;
            if (mode == ShockMode::independent) {
                rng::CounterRng g(spec.seed, r * pop.agents.size() + ai + 1);
                for (auto& s : shocks) s = g.normal();
            }
            const double drift = (d.mu_Z - 0.5 * d.sigma_Z * d.sigma_Z) * spec.dt;
            const double vol = d.sigma_Z * std::sqrt(spec.dt);
            const double coef = p.agent.beta * d.phi / d.P_ann;
            const double pre_sub = p.agent.s_sub / p.retrofit.eta;
            const double post_sub = p.agent.s_sub / p.retrofit.eta_tilde;
            bool post = a.regime0 == Regime::ImmediateInvest;
            const double log_zstar = d.waiting() ? std::log(d.z_star) : 0.0;
            double x = std::log(a.z0);
            double x_at_hit = post ? x : 0.0;
            std::size_t next = 0;
            for (std::size_t k = 0; k <= n_steps && next < time_idx.size(); ++k) {
                if (k > 0) x += drift + vol * shocks[k - 1];
                if (!post && x >= log_zstar) {
                    post = true;
                    x_at_hit = x;
                }
                if (k == time_idx[next]) {
                    // post state: Z_tilde_t = (Z_hat_at_hit + theta) e^(x - x_at_hit)
                    //           = Z_hat_t + theta e^(x - x_at_hit)
                    const double zhat = std::exp(x);
                    const double fuel =
                        post ? post_sub + coef * (zhat + d.theta * std::exp(x - x_at_hit))
                             : pre_sub + coef * zhat;
                    totals[next] += fuel * to_kwh;
                    ++next;
                }
            }
        }
        for (std::size_t j = 0; j < times.size(); ++j) rep_curves[j].push_back(totals[j]);
    }

    ConsumptionCurve out;
    for (std::size_t j = 0; j < times.size(); ++j) {
        auto est = stochastic::reduce_samples(rep_curves[j], 0.0);
        out.mean.push_back(est.value);
        out.se.push_back(est.se);
    }
    return out;
}

} // namespace retrofit::aggregate
