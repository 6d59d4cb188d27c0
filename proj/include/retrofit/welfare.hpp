// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <string>

#include "retrofit/common.hpp"
#include "retrofit/hitting.hpp"
#include "retrofit/params.hpp"
#include "retrofit/solution.hpp"

// Social evaluation of the retrofit decision.
//
// The retrofit changes the fuel draw by Q_t = c_t - c_hat_t (watts), the
// difference between the realised and the never-retrofit (counterfactual)
// policies driven by the same shocks.  The planner prices this at the
// marginal social cost of energy, a GBM varpi with varpi_0 = pi
// (carbon price x emissions factor) and drift mu_varpi, discounted at
// eps_hat = epsilon + lambda:
//     V_sc = E int_0^inf e^(-eps_hat t) varpi_t Q_t dt.
// The service-side counterpart R_t = s_t - s_hat_t >= 0 is the rebound;
// Q_t > 0 (more energy than the counterfactual) is backfire.
//
// The private side is summarised by the equivalent variation V_ev: the extra
// disposable capital the counterfactual agent would need to reach the value
// of the optimal invest-or-wait policy.  Total improvement: V = V_ev - V_sc.

namespace retrofit::welfare {

using params::DerivedConstants;
using params::ModelParams;
using params::UnitConventions;

struct SocialParams {
    double epsilon;          // social discount rate, 1/year
    double mu_varpi;         // drift of the marginal social cost, 1/year
    double sigma_varpi;      // volatility of the marginal social cost, 1/sqrt(year)
    double carbon_price;     // EUR per tonne of carbon
    double emissions_factor; // tonnes of carbon per kWh of fuel

    // initial marginal social cost, EUR/kWh
    double pi0() const { return carbon_price * emissions_factor; }
    // annualised: EUR per sustained watt per year
    double pi_ann(const UnitConventions& u) const {
        return pi0() * u.hours_per_year * UnitConventions::watt_to_kilowatt;
    }
};

struct WelfareReport {
    double V_sc;    // social cost of the induced consumption change, EUR
    double V_ev;    // private equivalent variation, EUR
    double V_total; // V_ev - V_sc, EUR
    Regime regime;  // ImmediateInvest or Waiting at the evaluation point
};

inline double eps_hat(const ModelParams& p, const SocialParams& sp) {
    return sp.epsilon + p.agent.lambda_;
}

// Convergence requirements of the discounted integrals.  Throws DomainError
// naming the failing inequality.
inline void check_convergence(const ModelParams& p, const DerivedConstants& d,
                              const SocialParams& sp) {
    const double eh = eps_hat(p, sp);
    if (eh <= 0.0) throw DomainError("social cost: requires epsilon + lambda > 0");
    if (eh - sp.mu_varpi <= 0.0)
        throw DomainError("social cost: requires eps_hat - mu_varpi > 0 "
                          "(social cost growth outpaces discounting)");
    if (eh - sp.mu_varpi - d.mu_Z <= 0.0)
        throw DomainError("social cost: requires eps_hat - mu_varpi - mu_Z > 0 "
                          "(consumption growth outpaces discounting)");
}

// ---------------------------------------------------------------------------
// Rebound and backfire expectations
// ---------------------------------------------------------------------------

// E[R_t]: expected service-level gain over the counterfactual, deg C.
// Immediate regime: the retrofitted and counterfactual states grow from
// (z + theta) and z at the common rate, so
//     E[R_t] = beta phi / P_ann * (eta_tilde (z + theta) - eta z) e^(mu_Z t).
// Waiting regime: the gain starts at the hitting time, where the states are
// (z_star + theta) and z_star; integrating the hitting density against the
// common growth gives the same expression with e^(mu_Z t) replaced by the
// growth integral.
inline double rebound_expectation(const ModelParams& p, const DerivedConstants& d, double t,
                                  double z) {
    if (z <= 0.0) throw DomainError("rebound_expectation: disposable capital must be positive");
    const double coef = p.agent.beta * d.phi / d.P_ann;
    if (params::regime_at(d, z) == Regime::ImmediateInvest) {
        return coef * (p.retrofit.eta_tilde * (z + d.theta) - p.retrofit.eta * z) *
               std::exp(d.mu_Z * t);
    }
    const double at_hit =
        coef * (p.retrofit.eta_tilde * (d.z_star + d.theta) - p.retrofit.eta * d.z_star);
    return at_hit * hitting::growth_integral(z, d.z_star, d.mu_Z, d.sigma_Z, d.mu_Z, t);
}

// E[Q_t]: expected change in fuel draw over the counterfactual, W.
// Q_t = (1/eta_tilde - 1/eta) s_sub + beta phi / P_ann * (Z_tilde_t - Z_hat_t),
// and the state difference equals theta growing at the common rate from the
// investment time.
inline double backfire_expectation(const ModelParams& p, const DerivedConstants& d, double t,
                                   double z) {
    if (z <= 0.0) throw DomainError("backfire_expectation: disposable capital must be positive");
    const double subsistence =
        (1.0 / p.retrofit.eta_tilde - 1.0 / p.retrofit.eta) * p.agent.s_sub;
    const double coef = p.agent.beta * d.phi / d.P_ann;
    if (params::regime_at(d, z) == Regime::ImmediateInvest)
        return subsistence + coef * d.theta * std::exp(d.mu_Z * t);
    const double cdf = hitting::cdf(z, d.z_star, d.mu_Z, d.sigma_Z, t);
    return subsistence * cdf +
           coef * d.theta * hitting::growth_integral(z, d.z_star, d.mu_Z, d.sigma_Z, d.mu_Z, t);
}

// P(Q_t > 0): probability of backfire at time t.  Backfire requires a
// positive premium (theta > 0, the immediate regime); the threshold is
// theta M_t > kappa_Q for the common growth factor M_t.
struct BackfireProbability {
    double value;        // P(Q_t > 0)
    bool theta_positive; // false: backfire impossible, value is identically 0
};

inline BackfireProbability prob_backfire(const ModelParams& p, const DerivedConstants& d,
                                         double t) {
    (void)p;
    if (d.theta <= 0.0) return {0.0, false};
    if (t < 0.0) throw DomainError("prob_backfire: time must be non-negative");
    if (t == 0.0) return {d.theta > d.kappa_Q ? 1.0 : 0.0, true};
    // ln M_t ~ N((mu_Z - sigma_Z^2/2) t, sigma_Z^2 t)
    const double mean = (d.mu_Z - 0.5 * d.sigma_Z * d.sigma_Z) * t;
    const double sd = d.sigma_Z * std::sqrt(t);
    const double threshold = std::log(d.kappa_Q / d.theta);
    return {1.0 - math::norm_cdf((threshold - mean) / sd), true};
}

// ---------------------------------------------------------------------------
// Social cost
// ---------------------------------------------------------------------------

// Coefficients of the closed-form integral I(pi) = A0 + A1 theta, the social
// cost conditional on investing at time 0:
//     A0 = (1/eta_tilde - 1/eta) s_sub pi_ann / (eps_hat - mu_varpi)
//     A1 = beta phi (pi0 / P) / (eps_hat - mu_varpi - mu_Z).
struct SocialCostCoeffs {
    double A0;
    double A1;
    double eps_hat;
};

inline SocialCostCoeffs social_cost_coeffs(const ModelParams& p, const DerivedConstants& d,
                                           const SocialParams& sp) {
    check_convergence(p, d, sp);
    const double eh = eps_hat(p, sp);
    SocialCostCoeffs c;
    c.eps_hat = eh;
    c.A0 = (1.0 / p.retrofit.eta_tilde - 1.0 / p.retrofit.eta) * p.agent.s_sub *
           sp.pi_ann(p.units) / (eh - sp.mu_varpi);
    c.A1 = p.agent.beta * d.phi * (sp.pi0() / p.market.P) / (eh - sp.mu_varpi - d.mu_Z);
    return c;
}

// I(pi): discounted expected social cost when the retrofit happens now.
inline double social_cost_integral(const ModelParams& p, const DerivedConstants& d,
                                   const SocialParams& sp) {
    const auto c = social_cost_coeffs(p, d, sp);
    return c.A0 + c.A1 * d.theta;
}

// E[e^(-rho tau)] for the threshold-hitting time from disposable capital z.
inline double laplace_hitting(const ModelParams& p, const DerivedConstants& d, double z,
                              double rho) {
    (void)p;
    if (z <= 0.0) throw DomainError("laplace_hitting: disposable capital must be positive");
    if (!d.waiting()) return 1.0; // investment at time 0
    return hitting::laplace(z, d.z_star, d.mu_Z, d.sigma_Z, rho);
}

// V_sc at disposable capital z: I(pi) now, or Laplace-discounted to the
// hitting time while waiting (the carbon-price drift folds into the rate).
inline double social_cost(const ModelParams& p, const DerivedConstants& d,
                          const SocialParams& sp, double z) {
    const double I = social_cost_integral(p, d, sp);
    if (params::regime_at(d, z) == Regime::ImmediateInvest) return I;
    return laplace_hitting(p, d, z, eps_hat(p, sp) - sp.mu_varpi) * I;
}

// ---------------------------------------------------------------------------
// Equivalent variation and the total
// ---------------------------------------------------------------------------

// V_ev(w): extra disposable capital that makes the counterfactual agent as
// well off as under the optimal policy.  Immediate regime has the closed
// form (eta_tilde/eta)^beta (z + theta) - z; in the waiting regime invert
// the counterfactual value at F(w).
inline double equivalent_variation(const ModelParams& p, const DerivedConstants& d, double w) {
    const double z = w + d.H;
    if (z <= 0.0) throw DomainError("equivalent_variation: disposable capital must be positive");
    if (params::regime_at(d, z) == Regime::ImmediateInvest) {
        const double lift = std::exp(p.agent.beta * std::log(p.retrofit.eta_tilde / p.retrofit.eta));
        return lift * (z + d.theta) - z;
    }
    const double F = solution::primal_value(p, d, w);
    return solution::counterfactual_inverse(d, F, p.agent.gamma) - z;
}

inline WelfareReport total_welfare(const ModelParams& p, const DerivedConstants& d,
                                   const SocialParams& sp, double w) {
    const double z = w + d.H;
    WelfareReport rep;
    rep.regime = params::regime_at(d, z);
    rep.V_sc = social_cost(p, d, sp, z);
    rep.V_ev = equivalent_variation(p, d, w);
    rep.V_total = rep.V_ev - rep.V_sc;
    return rep;
}

} // namespace retrofit::welfare
