// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>

#include "retrofit/common.hpp"
#include "retrofit/math.hpp"
#include "retrofit/params.hpp"

// Household optimal policy.
//
// State variables, all in EUR:
//   z      = w + H        disposable capital before the retrofit
//   z_tilde = w + H_tilde disposable capital after the retrofit
// Under the optimal policy each is a geometric Brownian motion with drift
// mu_Z and volatility sigma_Z, which is what makes closed forms possible.
//
// The waiting-region value is obtained through convex duality: the dual
// value function is C^1-pasted at a free boundary z_hat_star in the dual
// variable, and the primal value is recovered from the Legendre transform
//   F(w) = inf_{zh > 0} [ f_hat(zh) + zh (w + H) ],
// whose minimiser zh solves -f_hat'(zh) = w + H.  The dual variable is the
// marginal value of wealth, so F'(w) = zh along the way.  Because the
// boundary sits around Gamma^-gamma z_star^-gamma (~1e-19 at case-study
// scale), every power here is evaluated through logarithms.

namespace retrofit::solution {

using params::DerivedConstants;
using params::ModelParams;

// Optimal controls at a point in time.
struct ControlTriple {
    double a; // share of wealth in the risky asset (undefined at w = 0)
    double x; // non-energy consumption, EUR/year
    double s; // energy service, deg C
    double c; // fuel draw s/eta (existing state) or s/eta_tilde (post), W
};

// Constants of the dual value function on the waiting side.
struct DualSolution {
    double A0_dual;        // coefficient of the option (power) term
    double z_hat_star;     // dual free boundary
    double log_z_hat_star; // its logarithm
    double a0;             // exponent of the option term
    double Phi;            // dual utility scale at existing-state prices (= Gamma_hat)
    double gamma;          // relative risk aversion
};

inline DualSolution dual_solution(const ModelParams& p, const DerivedConstants& d) {
    params::require_waiting(d, d.z_star, "dual machinery");
    return {d.A0_dual, d.z_hat_star, d.log_z_hat_star, d.a0, d.Gamma_hat, p.agent.gamma};
}

// ---------------------------------------------------------------------------
// Static utility duality
// ---------------------------------------------------------------------------

struct DualUtilityPoint {
    double value; // sup_{x,s} [U(x,s) - x pi - s xi]
    double b0;    // maximising non-energy consumption x, EUR/year
    double b1;    // maximising service level s, deg C
};

// Convex dual of the Stone-Geary utility
//   U(x, s) = ((x - x_sub)^(1-beta) (s - s_sub)^beta)^(1-gamma) / (1-gamma)
// at shadow prices pi (wealth) and xi (service).  With
//   M = (pi/(1-beta))^(1-beta) (xi/beta)^beta,  gh = (1-gamma)/gamma,
// the maximiser splits excess expenditure M^(-gh) in proportions
// (1-beta, beta):
//   b0 = x_sub + (1-beta)/pi * M^(-gh),   b1 = s_sub + beta/xi * M^(-gh),
//   value = -x_sub pi - s_sub xi + (1/gh) M^(-gh).
inline DualUtilityPoint dual_utility(double pi, double xi, const params::AgentParams& ag) {
    if (pi <= 0.0 || xi <= 0.0)
        throw DomainError("dual_utility: shadow prices must be positive");
    const double gh = (1.0 - ag.gamma) / ag.gamma;
    const double log_pi = std::log(pi), log_xi = std::log(xi);
    const double log_M = (1.0 - ag.beta) * (log_pi - std::log(1.0 - ag.beta)) +
                         ag.beta * (log_xi - std::log(ag.beta));
    const double log_Mg = -gh * log_M; // log of M^(-gh)
    DualUtilityPoint out;
    out.b0 = ag.x_sub + std::exp(std::log(1.0 - ag.beta) - log_pi + log_Mg);
    out.b1 = ag.s_sub + std::exp(std::log(ag.beta) - log_xi + log_Mg);
    out.value = -ag.x_sub * pi - ag.s_sub * xi + std::exp(log_Mg) / gh;
    return out;
}

// ---------------------------------------------------------------------------
// Terminal and counterfactual values
// ---------------------------------------------------------------------------

// Power-utility value Gamma^-gamma * z^(1-gamma) / (1-gamma), via logs.
// Negative for gamma > 1.
inline double power_value(double scale, double z, double gamma) {
    return -std::exp(-gamma * std::log(scale) + (1.0 - gamma) * std::log(z)) / (gamma - 1.0);
}

// Lifetime value immediately after the retrofit, as a function of current
// wealth w: the loan is already priced into H_tilde, so the state is
// z_tilde = w + H_tilde.
inline double terminal_gain(const ModelParams& p, const DerivedConstants& d, double w) {
    const double zt = w + d.H_tilde;
    if (zt <= 0.0)
        throw DomainError("terminal_gain: disposable capital non-positive after the retrofit");
    return power_value(d.Gamma, zt, p.agent.gamma);
}

// Lifetime value of never retrofitting, state z = w + H.
inline double counterfactual_value(const ModelParams& p, const DerivedConstants& d, double w) {
    const double z = w + d.H;
    if (z <= 0.0)
        throw DomainError("counterfactual_value: disposable capital non-positive");
    return power_value(d.Gamma_hat, z, p.agent.gamma);
}

// Inverse of the counterfactual value: the disposable capital z that attains
// value u under the never-retrofit policy.  Needed for equivalent variation.
inline double counterfactual_inverse(const DerivedConstants& d, double u, double gamma) {
    if (u >= 0.0) throw DomainError("counterfactual_inverse: value must be negative (gamma > 1)");
    // z = Gamma_hat^(gamma/(1-gamma)) ((1-gamma) u)^(1/(1-gamma))
    return std::exp(-(gamma * std::log(d.Gamma_hat) + std::log((gamma - 1.0) * (-u))) /
                    (gamma - 1.0));
}

// ---------------------------------------------------------------------------
// Dual value function
// ---------------------------------------------------------------------------

// u_hat(zh) = (gamma/(1-gamma)) zh^((gamma-1)/gamma), the dual of the
// homogeneous part; and its derivative u_hat'(zh) = -zh^(-1/gamma).
inline double u_hat_log(double log_zh, double gamma) {
    return gamma / (1.0 - gamma) * std::exp((gamma - 1.0) / gamma * log_zh);
}

// Dual value f_hat at log zh.  Two branches pasted C^1 at the boundary:
//   zh <= zh*  (stop):  Gamma^-1 u_hat(zh) + theta zh
//   zh >= zh*  (wait):  Phi^-1 u_hat(zh) + A0 (zh/zh*)^(-a0)
inline double dual_value_log(const ModelParams& p, const DerivedConstants& d, double log_zh) {
    params::require_waiting(d, d.z_star, "dual_value");
    const double gamma = p.agent.gamma;
    if (log_zh <= d.log_z_hat_star)
        return u_hat_log(log_zh, gamma) / d.Gamma + d.theta * std::exp(log_zh);
    const double y = log_zh - d.log_z_hat_star;
    return u_hat_log(log_zh, gamma) / d.Gamma_hat + d.A0_dual * std::exp(-d.a0 * y);
}

inline double dual_value(const ModelParams& p, const DerivedConstants& d, double zh) {
    if (zh <= 0.0) throw DomainError("dual_value: dual variable must be positive");
    return dual_value_log(p, d, std::log(zh));
}

// -f_hat'(zh): the disposable capital at which zh is the marginal value of
// wealth.  Strictly decreasing in zh on the waiting branch.
inline double dual_neg_slope_log(const ModelParams& p, const DerivedConstants& d, double log_zh) {
    const double gamma = p.agent.gamma;
    if (log_zh <= d.log_z_hat_star)
        return std::exp(-log_zh / gamma) / d.Gamma - d.theta;
    const double y = log_zh - d.log_z_hat_star;
    return std::exp(-log_zh / gamma) / d.Gamma_hat +
           d.a0 * d.A0_dual * std::exp(-d.log_z_hat_star - (d.a0 + 1.0) * y);
}

// f_hat''(zh) > 0 (the dual value is convex).
inline double dual_second_log(const ModelParams& p, const DerivedConstants& d, double log_zh) {
    const double gamma = p.agent.gamma;
    if (log_zh <= d.log_z_hat_star)
        return std::exp(-(1.0 / gamma + 1.0) * log_zh) / (gamma * d.Gamma);
    const double y = log_zh - d.log_z_hat_star;
    return std::exp(-(1.0 / gamma + 1.0) * log_zh) / (gamma * d.Gamma_hat) +
           d.a0 * (d.a0 + 1.0) * d.A0_dual * std::exp(-2.0 * d.log_z_hat_star - (d.a0 + 2.0) * y);
}

// Solve -f_hat'(zh) = z for log zh on the waiting branch, given 0 < z < z*.
// Monotonicity gives a unique root at or above the boundary; Newton with a
// bisection safeguard converges to |d log zh| < 1e-12 (relative 1e-12 in zh).
inline double invert_marginal_log(const ModelParams& p, const DerivedConstants& d, double z) {
    params::require_waiting(d, d.z_star, "invert_marginal");
    if (z <= 0.0 || z > d.z_star)
        throw DomainError("invert_marginal: disposable capital must lie in (0, z_star]");
    const double gamma = p.agent.gamma;
    // work in y = log zh - log zh* >= 0
    const auto fdf = [&](double y) {
        const double t1 = std::exp(-(d.log_z_hat_star + y) / gamma) / d.Gamma_hat;
        const double t2 = d.a0 * d.A0_dual * std::exp(-d.log_z_hat_star - (d.a0 + 1.0) * y);
        return std::make_pair(t1 + t2 - z, -t1 / gamma - (d.a0 + 1.0) * t2);
    };
    const double f0 = fdf(0.0).first; // = z_star - z >= 0
    if (f0 <= 0.0) return d.log_z_hat_star;
    double y_hi = 1.0;
    int guard = 0;
    while (fdf(y_hi).first > 0.0) {
        y_hi *= 2.0;
        if (++guard > 60) throw NumericError("invert_marginal: failed to bracket the root");
    }
    const double y = math::newton_bisect(fdf, 0.0, y_hi, f0, fdf(y_hi).first, 1e-13, 200,
                                         "invert_marginal");
    return d.log_z_hat_star + y;
}

// ---------------------------------------------------------------------------
// Primal value
// ---------------------------------------------------------------------------

struct ValuePoint {
    double F;      // lifetime value at wealth w
    double dF;     // marginal value of wealth (the dual variable)
    double d2F;    // second derivative (from dual convexity)
    Regime regime; // ImmediateInvest (z >= z* or theta >= 0) or Waiting
};

// Value of the optimal invest-or-wait policy at wealth w.
inline ValuePoint value_point(const ModelParams& p, const DerivedConstants& d, double w) {
    const double gamma = p.agent.gamma;
    if (w + d.H_tilde <= 0.0)
        throw DomainError("primal_value: disposable capital non-positive after the retrofit");
    const double z = w + d.H;
    if (!d.waiting() || z >= d.z_star) {
        // invest now: value is the post-retrofit value at z_tilde = z + theta
        const double zt = w + d.H_tilde;
        ValuePoint out;
        out.F = power_value(d.Gamma, zt, gamma);
        out.dF = std::exp(-gamma * std::log(d.Gamma) - gamma * std::log(zt));
        out.d2F = -gamma * out.dF / zt;
        out.regime = Regime::ImmediateInvest;
        return out;
    }
    const double log_zh = invert_marginal_log(p, d, z);
    ValuePoint out;
    out.F = dual_value_log(p, d, log_zh) + std::exp(log_zh) * z;
    out.dF = std::exp(log_zh);
    out.d2F = -1.0 / dual_second_log(p, d, log_zh);
    out.regime = Regime::Waiting;
    return out;
}

inline double primal_value(const ModelParams& p, const DerivedConstants& d, double w) {
    return value_point(p, d, w).F;
}

// ---------------------------------------------------------------------------
// Controls
// ---------------------------------------------------------------------------

// Myopic-looking closed forms for the two absorbing policies: total excess
// expenditure is phi * (disposable capital), split (1-beta, beta) between the
// goods; the risky share follows the Merton rule on disposable capital.
inline ControlTriple post_invest_controls(const ModelParams& p, const DerivedConstants& d,
                                          double w) {
    const double zt = w + d.H_tilde;
    if (zt <= 0.0) throw DomainError("optimal_controls: post-retrofit disposable capital non-positive");
    ControlTriple out;
    out.a = d.kappa_mpr / (p.agent.gamma * p.market.sigma_S) * zt / w;
    out.x = p.agent.x_sub + (1.0 - p.agent.beta) * d.phi * zt;
    out.s = p.agent.s_sub + p.agent.beta * d.phi * zt / d.price_retrofit;
    out.c = out.s / p.retrofit.eta_tilde;
    return out;
}

inline ControlTriple counterfactual_controls(const ModelParams& p, const DerivedConstants& d,
                                             double w) {
    const double z = w + d.H;
    if (z <= 0.0) throw DomainError("optimal_controls: disposable capital non-positive");
    ControlTriple out;
    out.a = d.kappa_mpr / (p.agent.gamma * p.market.sigma_S) * z / w;
    out.x = p.agent.x_sub + (1.0 - p.agent.beta) * d.phi * z;
    out.s = p.agent.s_sub + p.agent.beta * d.phi * z / d.price_existing;
    out.c = out.s / p.retrofit.eta;
    return out;
}

// Exact waiting-region controls, from the dual second-order quantities:
// consumption pair from the static duality at shadow prices
// (zh, price_existing * zh), risky share from a = kappa/sigma_S * zh f''(zh) / w.
inline ControlTriple waiting_controls(const ModelParams& p, const DerivedConstants& d, double w) {
    const double z = w + d.H;
    const double log_zh = invert_marginal_log(p, d, z); // validates domain
    const double zh = std::exp(log_zh);
    const auto du = dual_utility(zh, d.price_existing * zh, p.agent);
    ControlTriple out;
    out.a = d.kappa_mpr / p.market.sigma_S * zh * dual_second_log(p, d, log_zh) / w;
    out.x = du.b0;
    out.s = du.b1;
    out.c = out.s / p.retrofit.eta;
    return out;
}

// Controls by regime.  ImmediateInvest means the retrofit happens now, so
// the agent runs the post-investment policy from this instant.
inline ControlTriple optimal_controls(const ModelParams& p, const DerivedConstants& d, double w,
                                      Regime regime) {
    switch (regime) {
        case Regime::ImmediateInvest:
        case Regime::PostInvest:
            return post_invest_controls(p, d, w);
        case Regime::Counterfactual:
            return counterfactual_controls(p, d, w);
        case Regime::Waiting:
            return waiting_controls(p, d, w);
    }
    throw DomainError("optimal_controls: unknown regime");
}

// Waiting-region approximation: run the counterfactual controls until the
// threshold is reached.  Defined on the waiting region only (up to and
// including the boundary).
inline ControlTriple approx_controls(const ModelParams& p, const DerivedConstants& d, double w) {
    params::require_waiting(d, d.z_star, "approx_controls");
    const double z = w + d.H;
    if (z <= 0.0 || z > d.z_star)
        throw RegimeError("approx_controls: defined on the waiting region 0 < w + H <= z_star");
    return counterfactual_controls(p, d, w);
}

} // namespace retrofit::solution
