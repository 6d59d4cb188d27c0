// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>

#include "retrofit/common.hpp"
#include "retrofit/hitting.hpp"
#include "retrofit/params.hpp"
#include "retrofit/welfare.hpp"

// Optimal retrofit subsidy.
//
// The planner covers a fraction m of the retrofit cost (negative m is a
// levy), anticipating the agent's response: the agent re-optimises with cost
// (1 - m) K, which shifts the premium to theta(m) = theta + B1 K m and the
// threshold to z_star(m) = Lambda theta(m).  Public funds carry a cost
//     Psi(x) = xi0 x + (xi1 / 2) x^2,     x = m K,
// with xi0 >= 1 (marginal cost of public funds) and xi1 > 0 (friction).
//
// The planner minimises expected discounted social cost plus outlay:
//   immediate regime:  J(m) = I(pi; m) + Psi(m K)
//   waiting regime:    J(m) = L(z; eps_hat - mu_varpi) I(pi; m)
//                             + L(z; eps_hat) Psi(m K)
// where I(pi; m) = C0 + C1 m is linear in m and the Laplace factors price
// the delay until the (subsidy-dependent) threshold is reached.  The outlay
// is paid at the stopping time, so its factor carries no carbon-price drift.
//
// The subsidy cannot exceed m_bar = 1 - B0/(B1 K): at that rate the premium
// reaches zero and every agent invests at once.  For m large enough that
// z_star(m) <= z (the agent's current state), investment is already
// immediate and each Laplace factor saturates at 1; the objective is
// continuous across that kink.

namespace retrofit::subsidy {

using params::DerivedConstants;
using params::ModelParams;
using welfare::SocialParams;

struct PlannerParams {
    double xi0; // marginal cost of public funds, >= 1
    double xi1; // friction on public funds, > 0, 1/EUR
    SocialParams social;
};

inline void check_planner(const PlannerParams& pl) {
    if (pl.xi0 < 1.0) throw DomainError("planner: xi0 must be at least 1");
    if (pl.xi1 <= 0.0) throw DomainError("planner: xi1 must be positive");
}

struct SubsidyResult {
    double m_star;     // optimal subsidy rate (fraction of K; negative = levy)
    double J_star;     // objective value at the optimum, EUR
    Regime regime;     // regime the agent was in when the subsidy was set
    bool boundary_hit; // waiting regime: optimum at m = 0 or m = m_bar
};

inline double outlay(const PlannerParams& pl, double x) {
    return pl.xi0 * x + 0.5 * pl.xi1 * x * x;
}

// Objective pieces shared by the evaluators.
struct ObjectiveCoeffs {
    double C0;      // I(pi) at m = 0
    double C1;      // d I / d m = A1 B1 K
    double eps_hat; // planner's effective discount rate
};

inline ObjectiveCoeffs objective_coeffs(const ModelParams& p, const DerivedConstants& d,
                                        const PlannerParams& pl) {
    check_planner(pl);
    const auto c = welfare::social_cost_coeffs(p, d, pl.social);
    return {c.A0 + c.A1 * d.theta, c.A1 * d.B1 * p.retrofit.K, c.eps_hat};
}

// Laplace factor at rate r for the subsidised threshold z_star(m), capped at
// 1 once the threshold falls to or below the current state.
inline double laplace_factor(const ModelParams& p, const DerivedConstants& d, double z, double m,
                             double r) {
    const double theta_m = d.theta + d.B1 * p.retrofit.K * m;
    if (theta_m >= 0.0) return 1.0; // premium non-negative: immediate for everyone
    const double z_star_m = d.Lambda * theta_m;
    if (z >= z_star_m) return 1.0;
    return std::exp(hitting::laplace_exponent(d.mu_Z, d.sigma_Z, r) *
                    std::log(z_star_m / z));
}

// d/dm of the Laplace factor at rate r, zero on the saturated branch.
inline double laplace_factor_dm(const ModelParams& p, const DerivedConstants& d, double z,
                                double m, double r) {
    const double theta_m = d.theta + d.B1 * p.retrofit.K * m;
    if (theta_m >= 0.0) return 0.0;
    const double z_star_m = d.Lambda * theta_m;
    if (z >= z_star_m) return 0.0;
    const double L = std::exp(hitting::laplace_exponent(d.mu_Z, d.sigma_Z, r) *
                              std::log(z_star_m / z));
    return L * hitting::laplace_exponent(d.mu_Z, d.sigma_Z, r) * d.B1 * p.retrofit.K / theta_m;
}

// Planner objective at subsidy rate m for an agent with disposable capital z.
inline double planner_objective(const ModelParams& p, const DerivedConstants& d,
                                const PlannerParams& pl, double z, double m) {
    const auto co = objective_coeffs(p, d, pl);
    const double x = m * p.retrofit.K;
    double J;
    if (params::regime_at(d, z) == Regime::ImmediateInvest) {
        J = (co.C0 + co.C1 * m) + outlay(pl, x);
    } else {
        if (m < 0.0 || m > d.m_bar)
            throw DomainError("planner_objective: waiting-regime subsidy must lie in [0, m_bar]");
        const double L0 = laplace_factor(p, d, z, m, co.eps_hat - pl.social.mu_varpi);
        const double L1 = laplace_factor(p, d, z, m, co.eps_hat);
        J = L0 * (co.C0 + co.C1 * m) + L1 * outlay(pl, x);
    }
    if (!std::isfinite(J)) throw NumericError("planner_objective: non-finite value");
    return J;
}

// Analytic d J / d m.  Piecewise smooth: once the subsidy is generous enough
// that z_star(m) <= z the Laplace factors saturate and the derivative drops
// the delay terms; the objective itself stays continuous across that kink.
inline double planner_objective_dm(const ModelParams& p, const DerivedConstants& d,
                                   const PlannerParams& pl, double z, double m) {
    const auto co = objective_coeffs(p, d, pl);
    const double K = p.retrofit.K;
    const double x = m * K;
    const double psi_prime = (pl.xi0 + pl.xi1 * x) * K;
    if (params::regime_at(d, z) == Regime::ImmediateInvest) return co.C1 + psi_prime;
    const double r0 = co.eps_hat - pl.social.mu_varpi;
    const double r1 = co.eps_hat;
    const double L0 = laplace_factor(p, d, z, m, r0);
    const double L1 = laplace_factor(p, d, z, m, r1);
    return laplace_factor_dm(p, d, z, m, r0) * (co.C0 + co.C1 * m) + L0 * co.C1 +
           laplace_factor_dm(p, d, z, m, r1) * outlay(pl, x) + L1 * psi_prime;
}

// Immediate regime: quadratic in m, minimised in closed form.  The optimum
//     m* = -(C1 + xi0 K) / (xi1 K^2)
// is strictly negative (both C1 > 0 and xi0 K > 0): the planner levies a
// small charge on agents who invest regardless.
inline SubsidyResult optimal_subsidy_immediate(const ModelParams& p, const DerivedConstants& d,
                                               const PlannerParams& pl, double z) {
    if (params::regime_at(d, z) != Regime::ImmediateInvest)
        throw RegimeError("optimal_subsidy_immediate: agent is not in the immediate regime");
    const auto co = objective_coeffs(p, d, pl);
    const double K = p.retrofit.K;
    SubsidyResult out;
    out.m_star = -(co.C1 + pl.xi0 * K) / (pl.xi1 * K * K);
    out.J_star = planner_objective(p, d, pl, z, out.m_star);
    out.regime = Regime::ImmediateInvest;
    out.boundary_hit = false;
    return out;
}

// Waiting regime.  Past the saturation point m_kink -- the subsidy that
// drops the investment threshold exactly to the agent's current state -- the
// retrofit happens immediately and the objective C0 + C1 m + psi(m K) is
// strictly increasing (C1 > 0, convex increasing outlay), so the search
// domain is [0, m_kink] (m_kink < m_bar whenever the agent is waiting).  On
// that branch the objective is smooth: scan a 512-point grid, refine the
// best bracket by golden section, and sharpen an interior optimum on the
// first-order condition, which pins it to machine precision.
inline SubsidyResult optimal_subsidy_waiting(const ModelParams& p, const DerivedConstants& d,
                                             const PlannerParams& pl, double z) {
    if (params::regime_at(d, z) != Regime::Waiting)
        throw RegimeError("optimal_subsidy_waiting: agent is not in the waiting regime");
    const double m_kink = (z / d.Lambda - d.theta) / (d.B1 * p.retrofit.K);
    const double m_hi = std::min(d.m_bar, m_kink);
    const auto J = [&](double m) { return planner_objective(p, d, pl, z, m); };

    constexpr int n_grid = 512;
    int best = 0;
    double best_val = J(0.0);
    for (int i = 1; i <= n_grid; ++i) {
        const double m = m_hi * static_cast<double>(i) / n_grid;
        const double v = J(m);
        if (v < best_val) { best_val = v; best = i; }
    }
    const double lo = m_hi * static_cast<double>(std::max(0, best - 1)) / n_grid;
    const double hi = m_hi * static_cast<double>(std::min(n_grid, best + 1)) / n_grid;
    double m_int = math::golden_min(J, lo, hi, 1e-8);
    if (m_int > lo && m_int < hi) {
        const auto dJ = [&](double m) { return planner_objective_dm(p, d, pl, z, m); };
        if (dJ(lo) < 0.0 && dJ(hi) > 0.0)
            m_int = math::bisect(dJ, lo, hi, 1e-15, 200, "planner first-order condition");
    }
    const double J_int = J(m_int);

    // candidates: refined interior point and the two edges of the domain
    const double J0 = J(0.0), J1 = J(m_hi);
    SubsidyResult out;
    out.regime = Regime::Waiting;
    if (J_int <= J0 + 1e-10 && J_int <= J1 + 1e-10) {
        out.m_star = m_int;
        out.J_star = J_int;
        // interior by value, but the refined point can still sit at an edge
        out.boundary_hit = (m_int <= 1e-12 || m_int >= m_hi * (1.0 - 1e-12));
    } else if (J0 <= J1) {
        out.m_star = 0.0;
        out.J_star = J0;
        out.boundary_hit = true;
    } else {
        out.m_star = m_hi;
        out.J_star = J1;
        out.boundary_hit = true;
    }
    return out;
}

// Dispatch on the agent's regime.
inline SubsidyResult optimal_subsidy(const ModelParams& p, const DerivedConstants& d,
                                     const PlannerParams& pl, double z) {
    return params::regime_at(d, z) == Regime::ImmediateInvest
               ? optimal_subsidy_immediate(p, d, pl, z)
               : optimal_subsidy_waiting(p, d, pl, z);
}

// The agent's model under an accepted subsidy: cost scales to (1 - m) K.
// Everything downstream (theta, thresholds, controls) re-derives from this.
inline ModelParams subsidized_params(const ModelParams& p, double m) {
    ModelParams out = p;
    out.retrofit.K = (1.0 - m) * p.retrofit.K;
    return out;
}

} // namespace retrofit::subsidy
