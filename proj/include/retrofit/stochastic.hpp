// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "retrofit/common.hpp"
#include "retrofit/hitting.hpp"
#include "retrofit/math.hpp"
#include "retrofit/params.hpp"
#include "retrofit/rng.hpp"
#include "retrofit/solution.hpp"
#include "retrofit/welfare.hpp"

// Path simulation and Monte Carlo oracles.
//
// Disposable capital is simulated exactly in logarithms:
//     ln Z_{k+1} = ln Z_k + (mu - sigma^2/2) dt + sigma sqrt(dt) N_k,
// so the scheme has no discretisation bias at the grid points; only
// barrier-crossing detection between grid points is approximate.  Every
// path owns a counter-based random stream keyed by its index, which makes
// results byte-identical across runs and thread counts.  Reductions over
// paths are deterministic pairwise sums.

namespace retrofit::stochastic {

using params::DerivedConstants;
using params::ModelParams;

struct PathSpec {
    double horizon = 0.0;     // years; 0 = pick from the discount-weight rule below
    double dt = 1.0 / 52.0;   // step, years
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 20260816;
    bool antithetic = false;  // pair path 2j+1 with the negated normals of 2j
    bool bridge_correction = false; // Brownian-bridge barrier test inside steps
};

struct McEstimate {
    double value;
    double se;               // standard error of the mean
    std::uint64_t n;         // independent samples (pairs count once)
    double truncation_bound; // relative bound on the mass beyond the horizon
};

// Mean and standard error from per-sample values, deterministic pairwise.
inline McEstimate reduce_samples(std::vector<double>& vals, double truncation_bound) {
    const std::size_t n = vals.size();
    if (n < 2) throw NumericError("monte carlo: need at least two samples");
    const double mean = math::pairwise_sum(vals) / static_cast<double>(n);
    for (auto& v : vals) {
        const double e = v - mean;
        v = e * e;
    }
    const double var = math::pairwise_sum(vals) / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n)), n, truncation_bound};
}

// Exact GBM path at the grid times k dt, k = 0..n_steps.
inline std::vector<double> simulate_gbm(double z0, double mu, double sigma,
                                        const PathSpec& spec, std::uint64_t path_index) {
    if (z0 <= 0.0) throw DomainError("simulate_gbm: initial state must be positive");
    const auto n_steps = static_cast<std::size_t>(std::llround(spec.horizon / spec.dt));
    rng::CounterRng g(spec.seed, path_index);
    std::vector<double> out(n_steps + 1);
    const double drift = (mu - 0.5 * sigma * sigma) * spec.dt;
    const double vol = sigma * std::sqrt(spec.dt);
    double x = std::log(z0);
    out[0] = z0;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        x += drift + vol * g.normal();
        out[k] = std::exp(x);
    }
    return out;
}

// Analytic first-passage law for the threshold z_star, re-exposed on model
// types.  States at or above the threshold have crossed at time 0: the CDF
// is identically 1 and the density carries an atom there (reported as 0 by
// pdf; use the CDF for the mass).
inline double hitting_cdf(const DerivedConstants& d, double z, double t) {
    if (!d.waiting()) return 1.0;
    return hitting::cdf(z, d.z_star, d.mu_Z, d.sigma_Z, t);
}

inline double hitting_pdf(const DerivedConstants& d, double z, double t) {
    if (!d.waiting()) return 0.0;
    return hitting::pdf(z, d.z_star, d.mu_Z, d.sigma_Z, t);
}

// ---------------------------------------------------------------------------
// Trajectory simulation
// ---------------------------------------------------------------------------

struct Trajectory {
    std::vector<double> times; // years
    std::vector<double> W;     // financial wealth, EUR
    std::vector<double> Z;     // disposable capital of the current regime, EUR
    std::vector<double> a;     // risky share
    std::vector<double> x;     // non-energy consumption, EUR/year
    std::vector<double> s;     // energy service, deg C
    std::vector<double> c;     // fuel draw, W
    std::vector<double> R;     // service gain over the counterfactual twin, deg C
    std::vector<double> Q;     // fuel change over the counterfactual twin, W
    std::vector<Regime> regime;
    double tau_hat = 0.0;      // threshold-hitting time (valid when hit)
    bool hit = false;
    bool guard_band_hit = false; // disposable capital approached the domain edge
};

// Simulate one agent path.  Waiting agents run the counterfactual
// (approximation) controls until the threshold is first reached on the
// grid, then switch: Z_tilde = Z + theta, post-investment controls
// thereafter.  The counterfactual twin (same shocks, never invests) is
// carried along to report R and Q.  The regime switches at most once.
inline Trajectory simulate_trajectory(const ModelParams& p, const DerivedConstants& d,
                                      const PathSpec& spec, std::uint64_t path_index) {
    const double w0 = p.agent.w0;
    const double z0 = w0 + d.H;
    if (z0 <= 0.0) throw DomainError("simulate_trajectory: disposable capital non-positive");
    const double horizon = spec.horizon > 0.0 ? spec.horizon : 25.0;
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / spec.dt));
    const double guard = 1e-12 * z0;

    const std::uint64_t stream = spec.antithetic ? path_index / 2 : path_index;
    const double sign = (spec.antithetic && (path_index & 1)) ? -1.0 : 1.0;
    rng::CounterRng g(spec.seed, stream);

    const double drift = (d.mu_Z - 0.5 * d.sigma_Z * d.sigma_Z) * spec.dt;
    const double vol = d.sigma_Z * std::sqrt(spec.dt);
    const double coef = p.agent.beta * d.phi / d.P_ann; // fuel per EUR of disposable capital
    const double sub_gap = (1.0 / p.retrofit.eta_tilde - 1.0 / p.retrofit.eta) * p.agent.s_sub;

    Trajectory tr;
    tr.times.reserve(n_steps + 1);
    const bool immediate = params::regime_at(d, z0) == Regime::ImmediateInvest;
    bool post = immediate;
    double log_zhat = std::log(z0);       // counterfactual twin (never invests)
    double theta_at_hit = immediate ? d.theta : 0.0; // premium at the switch
    double zhat_at_hit = immediate ? z0 : 0.0;
    if (immediate) {
        tr.hit = true;
        tr.tau_hat = 0.0;
    }

    for (std::size_t k = 0; k <= n_steps; ++k) {
        if (k > 0) log_zhat += drift + vol * sign * g.normal();
        const double t = static_cast<double>(k) * spec.dt;
        const double zhat = std::exp(log_zhat);

        if (!post && zhat >= d.z_star) {
            post = true;
            tr.hit = true;
            tr.tau_hat = t;
            theta_at_hit = d.theta;
            zhat_at_hit = zhat;
        }

        tr.times.push_back(t);
        if (!post) {
            const double w = zhat - d.H;
            const auto ctrl = solution::counterfactual_controls(p, d, w);
            tr.W.push_back(w);
            tr.Z.push_back(zhat);
            tr.a.push_back(ctrl.a);
            tr.x.push_back(ctrl.x);
            tr.s.push_back(ctrl.s);
            tr.c.push_back(ctrl.c);
            tr.R.push_back(0.0);
            tr.Q.push_back(0.0);
            tr.regime.push_back(Regime::Waiting);
            if (zhat <= guard) tr.guard_band_hit = true;
        } else {
            // post-investment state shares the twin's growth factor
            const double growth = zhat / zhat_at_hit;
            const double zt = (zhat_at_hit + theta_at_hit) * growth;
            const double w = zt - d.H_tilde;
            const auto ctrl = solution::post_invest_controls(p, d, w);
            tr.W.push_back(w);
            tr.Z.push_back(zt);
            tr.a.push_back(ctrl.a);
            tr.x.push_back(ctrl.x);
            tr.s.push_back(ctrl.s);
            tr.c.push_back(ctrl.c);
            tr.R.push_back(coef * (p.retrofit.eta_tilde * zt - p.retrofit.eta * zhat));
            tr.Q.push_back(sub_gap + coef * (zt - zhat));
            tr.regime.push_back(Regime::PostInvest);
            if (zt <= guard) tr.guard_band_hit = true;
        }
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Value oracle
// ---------------------------------------------------------------------------

enum class Policy { post_invest, counterfactual, approx_waiting };

// Discounted lifetime utility of a fixed policy, estimated by trapezoidal
// integration of the exact flow along simulated paths:
//     E int_0^T e^(-delta_hat t) U(x_t, s_t) dt,
// where along each absorbing branch U reduces to coef * Z^(1-gamma) with
//     coef = phi * Gamma_branch^(-gamma) / (1 - gamma).
// The horizon defaults to the point where the discount weight e^(-delta_hat T)
// falls below 1e-8; the reported truncation bound is the relative tail mass
// e^(-phi T) of the value integral.
inline McEstimate mc_value_oracle(const ModelParams& p, const DerivedConstants& d, double w0,
                                  Policy policy, const PathSpec& spec) {
    const double gamma = p.agent.gamma;
    const double horizon = spec.horizon > 0.0 ? spec.horizon : std::log(1e8) / d.delta_hat;
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / spec.dt));
    const double drift = (d.mu_Z - 0.5 * d.sigma_Z * d.sigma_Z) * spec.dt;
    const double vol = d.sigma_Z * std::sqrt(spec.dt);
    const double disc_step = std::exp(-d.delta_hat * spec.dt);

    const double coef_post = d.phi * std::exp(-gamma * std::log(d.Gamma)) / (1.0 - gamma);
    const double coef_cf = d.phi * std::exp(-gamma * std::log(d.Gamma_hat)) / (1.0 - gamma);

    double x0; // initial log state
    switch (policy) {
        case Policy::post_invest:
            if (w0 + d.H_tilde <= 0.0)
                throw DomainError("mc_value_oracle: post-retrofit state non-positive");
            x0 = std::log(w0 + d.H_tilde);
            break;
        case Policy::counterfactual:
        case Policy::approx_waiting:
            if (w0 + d.H <= 0.0)
                throw DomainError("mc_value_oracle: disposable capital non-positive");
            x0 = std::log(w0 + d.H);
            if (policy == Policy::approx_waiting)
                params::require_waiting(d, d.z_star, "mc_value_oracle(approx_waiting)");
            break;
        default:
            throw DomainError("mc_value_oracle: unknown policy");
    }
    const double log_zstar = d.waiting() ? std::log(d.z_star) : 0.0;

    const std::uint64_t n_streams = spec.antithetic ? spec.n_paths / 2 : spec.n_paths;
    std::vector<double> samples;
    samples.reserve(n_streams);

    for (std::uint64_t i = 0; i < n_streams; ++i) {
        double pair_total = 0.0;
        const int reps = spec.antithetic ? 2 : 1;
        for (int r = 0; r < reps; ++r) {
            rng::CounterRng g(spec.seed, i);
            const double sign = r == 0 ? 1.0 : -1.0;
            double x = x0;
            bool post = policy == Policy::post_invest;
            double coef = post ? coef_post
                               : coef_cf; // counterfactual and pre-hit approx share the flow
            double disc = 1.0;
            // trapezoid weights: half at both ends
            double acc = 0.5 * coef * std::exp((1.0 - gamma) * x);
            if (policy == Policy::approx_waiting && x >= log_zstar) {
                // starting at/above the threshold: invest at once
                post = true;
                coef = coef_post;
                x = std::log(std::exp(x) + d.theta);
                acc = 0.5 * coef * std::exp((1.0 - gamma) * x);
            }
            for (std::size_t k = 1; k <= n_steps; ++k) {
                x += drift + vol * sign * g.normal();
                disc *= disc_step;
                if (policy == Policy::approx_waiting && !post && x >= log_zstar) {
                    post = true;
                    coef = coef_post;
                    x = std::log(std::exp(x) + d.theta);
                }
                const double weight = k == n_steps ? 0.5 : 1.0;
                acc += weight * disc * coef * std::exp((1.0 - gamma) * x);
            }
            pair_total += acc * spec.dt;
        }
        samples.push_back(pair_total / reps);
    }
    return reduce_samples(samples, std::exp(-d.phi * horizon));
}

// ---------------------------------------------------------------------------
// Hitting-time oracle
// ---------------------------------------------------------------------------

struct HittingMc {
    std::vector<double> cdf;    // empirical P(tau <= t) at the requested times
    std::vector<double> cdf_se; // binomial standard errors
    McEstimate laplace;         // E[e^(-rho tau)]
    double horizon;
};

// Empirical first-passage distribution and Laplace transform.  Without the
// bridge correction a crossing is declared at the first grid point at or
// above the threshold (which biases the CDF down by O(sqrt(dt))); with it, a
// Brownian bridge test inside each step removes that bias and the crossing
// time is placed mid-step.
inline HittingMc mc_hitting(const ModelParams& p, const DerivedConstants& d, double z0,
                            const std::vector<double>& times, double rho,
                            const PathSpec& spec) {
    (void)p;
    params::require_waiting(d, d.z_star, "mc_hitting");
    if (z0 <= 0.0) throw DomainError("mc_hitting: initial state must be positive");
    double horizon = spec.horizon;
    for (double t : times) horizon = std::max(horizon, t);
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / spec.dt));
    const double drift = (d.mu_Z - 0.5 * d.sigma_Z * d.sigma_Z) * spec.dt;
    const double vol = d.sigma_Z * std::sqrt(spec.dt);
    const double b = std::log(d.z_star); // barrier in log space
    const double two_inv_s2dt = 2.0 / (vol * vol);

    std::vector<double> lap_samples;
    lap_samples.reserve(spec.n_paths);
    std::vector<std::uint64_t> hit_counts(times.size(), 0);

    for (std::uint64_t i = 0; i < spec.n_paths; ++i) {
        rng::CounterRng g(spec.seed, i);
        double x = std::log(z0);
        double tau = -1.0;
        for (std::size_t k = 1; k <= n_steps; ++k) {
            const double xn = x + drift + vol * g.normal();
            if (xn >= b) {
                tau = static_cast<double>(k) * spec.dt;
                break;
            }
            if (spec.bridge_correction) {
                // P(bridge from x to xn crosses b) = exp(-2 (b-x)(b-xn)/(sigma^2 dt))
                const double e = -(b - x) * (b - xn) * two_inv_s2dt;
                if (e > -40.0 && g.u01() < std::exp(e)) {
                    tau = (static_cast<double>(k) - 0.5) * spec.dt;
                    break;
                }
            }
            x = xn;
        }
        if (tau >= 0.0) {
            for (std::size_t j = 0; j < times.size(); ++j)
                if (tau <= times[j]) ++hit_counts[j];
            lap_samples.push_back(std::exp(-rho * tau));
        } else {
            lap_samples.push_back(0.0);
        }
    }

    HittingMc out;
    out.horizon = horizon;
    const auto n = static_cast<double>(spec.n_paths);
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double phat = static_cast<double>(hit_counts[j]) / n;
        out.cdf.push_back(phat);
        out.cdf_se.push_back(std::sqrt(std::max(phat * (1.0 - phat), 1e-12) / n));
    }
    out.laplace = reduce_samples(lap_samples, std::exp(-rho * horizon));
    return out;
}

// ---------------------------------------------------------------------------
// Welfare oracle
// ---------------------------------------------------------------------------

// Two-factor Monte Carlo for the social cost
//     V_sc = E int_0^inf e^(-eps_hat t) varpi_t Q_t dt,
// with independent Brownian motions driving disposable capital and the
// marginal social cost.  Waiting paths contribute nothing until the
// threshold crossing; afterwards Q follows from the twin construction,
// anchored at the exact barrier level (the continuous path crosses at z_star,
// so post-investment growth is measured from there, not from the overshoot
// state).  With spec.bridge_correction a Brownian-bridge test inside each
// step removes the O(sqrt(dt)) bias from crossings the grid misses.
inline McEstimate mc_welfare_oracle(const ModelParams& p, const DerivedConstants& d,
                                    const welfare::SocialParams& sp, double w0,
                                    const PathSpec& spec) {
    welfare::check_convergence(p, d, sp);
    const double eh = welfare::eps_hat(p, sp);
    const double z0 = w0 + d.H;
    if (z0 <= 0.0) throw DomainError("mc_welfare_oracle: disposable capital non-positive");
    const double decay = eh - sp.mu_varpi - std::max(d.mu_Z, 0.0);
    const double horizon = spec.horizon > 0.0 ? spec.horizon : std::log(1e4) / decay;
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / spec.dt));

    const double drift_z = (d.mu_Z - 0.5 * d.sigma_Z * d.sigma_Z) * spec.dt;
    const double vol_z = d.sigma_Z * std::sqrt(spec.dt);
    const double drift_v = (sp.mu_varpi - 0.5 * sp.sigma_varpi * sp.sigma_varpi) * spec.dt;
    const double vol_v = sp.sigma_varpi * std::sqrt(spec.dt);
    const double disc_step = std::exp(-eh * spec.dt);
    const double pi_ann = sp.pi_ann(p.units);
    const double sub_gap = (1.0 / p.retrofit.eta_tilde - 1.0 / p.retrofit.eta) * p.agent.s_sub;
    const double coef = p.agent.beta * d.phi / d.P_ann;
    const bool immediate = params::regime_at(d, z0) == Regime::ImmediateInvest;
    const double log_zstar = d.waiting() ? std::log(d.z_star) : 0.0;

    std::vector<double> samples;
    samples.reserve(spec.n_paths);
    for (std::uint64_t i = 0; i < spec.n_paths; ++i) {
        rng::CounterRng g(spec.seed, i);
        double x = std::log(z0); // counterfactual twin in logs
        double v = 0.0;          // log of varpi_t / pi_ann
        double disc = 1.0;
        bool post = immediate;
        double x_at_hit = immediate ? x : 0.0;
        double acc = 0.0;
        if (post) acc += 0.5 * (sub_gap + coef * d.theta); // varpi_0/pi_ann = 1
        for (std::size_t k = 1; k <= n_steps; ++k) {
            const double x_prev = x;
            x += drift_z + vol_z * g.normal();
            v += drift_v + vol_v * g.normal();
            disc *= disc_step;
            if (!post) {
                if (x >= log_zstar) {
                    post = true;
                    x_at_hit = log_zstar;
                } else if (spec.bridge_correction) {
                    const double expo = -2.0 * (log_zstar - x_prev) * (log_zstar - x) /
                                        (vol_z * vol_z);
                    if (expo > -40.0 && g.u01() < std::exp(expo)) {
                        post = true;
                        x_at_hit = log_zstar;
                    }
                }
            }
            if (post) {
                const double q = sub_gap + coef * d.theta * std::exp(x - x_at_hit);
                const double weight = k == n_steps ? 0.5 : 1.0;
                acc += weight * disc * std::exp(v) * q;
            }
        }
        samples.push_back(acc * spec.dt * pi_ann);
    }
    return reduce_samples(samples, std::exp(-decay * horizon));
}

} // namespace retrofit::stochastic
