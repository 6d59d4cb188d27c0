// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "retrofit/common.hpp"
#include "retrofit/math.hpp"

// Model primitives and the closed-form constants derived from them.
//
// Unit conventions, used consistently everywhere:
//   money     EUR            rates/flows  per year
//   energy    W (continuous draw); fuel bills convert via kWh
//   service   degrees Celsius of indoor temperature above outside baseline
//
// The energy price P is quoted in EUR/kWh.  A service level s (deg C)
// sustained for a year through an efficiency eta (deg C per W) draws s/eta
// watts continuously, i.e. (s/eta) * hours_per_year watt-hours per year, so
// the annualised cost flow is
//     (s / eta) * P * hours_per_year * watt_to_kilowatt     [EUR/year].
// We call P_ann := P * hours_per_year * watt_to_kilowatt the annualised
// price of a sustained watt [EUR/(W year)], and P_ann/eta the implicit price
// of one degree of service [EUR/(degC year)].

namespace retrofit::params {

// Financial market: risk-free drift, risky drift/volatility, energy price.
template <class T>
struct MarketParamsT {
    T mu_R;    // risk-free rate, 1/year
    T mu_S;    // risky asset drift, 1/year
    T sigma_S; // risky asset volatility, 1/sqrt(year)
    T P;       // energy price, EUR/kWh
};

// Household: preferences, discounting, subsistence, endowment.
template <class T>
struct AgentParamsT {
    T beta;    // utility weight on the energy service, in (0,1)
    T gamma;   // relative risk aversion, > 1
    T delta;   // subjective discount rate, 1/year
    T lambda_; // hazard rate of the planning horizon, 1/year
    T x_sub;   // subsistence non-energy consumption, EUR/year
    T s_sub;   // subsistence energy service, deg C
    T Y;       // labour income, EUR/year
    T w0;      // initial financial wealth, EUR
};

// Retrofit technology and financing.
template <class T>
struct RetrofitParamsT {
    T eta;       // existing-state efficiency, deg C per W
    T eta_tilde; // post-retrofit efficiency, deg C per W (> eta)
    T rho;       // borrowing rate for the retrofit loan, 1/year
    T K;         // retrofit cost, EUR
    T A;         // dwelling floor area, m^2 (reporting only)
};

// Unit conventions.  watt_to_kilowatt is fixed; hours_per_year is a
// convention, constrained to the physical band [8600, 8800].
struct UnitConventions {
    double hours_per_year = 8766.0; // hours in the mean Gregorian year
    static constexpr double watt_to_kilowatt = 1e-3;
};

template <class T>
struct ModelParamsT {
    MarketParamsT<T> market;
    AgentParamsT<T> agent;
    RetrofitParamsT<T> retrofit;
    UnitConventions units;
};

using MarketParams = MarketParamsT<double>;
using AgentParams = AgentParamsT<double>;
using RetrofitParams = RetrofitParamsT<double>;
using ModelParams = ModelParamsT<double>;

// Annualised cost flow of sustaining service s through efficiency eff,
// in EUR/year.
inline double energy_cost_flow(double s, double eff, const UnitConventions& units,
                               double P) {
    if (eff <= 0.0) throw DomainError("energy_cost_flow: efficiency must be positive");
    if (s < 0.0) throw DomainError("energy_cost_flow: service level must be non-negative");
    return s / eff * P * units.hours_per_year * UnitConventions::watt_to_kilowatt;
}

// ---------------------------------------------------------------------------
// Derived constants
// ---------------------------------------------------------------------------
//
// All closed-form quantities that the solution, welfare and subsidy layers
// need.  The chain is templated on the scalar type so that pushing a dual
// number through it yields exact parameter derivatives of every constant
// (notably the investment threshold w_star).
//
// Waiting-regime quantities (Lambda, z_star, w_star, A0_dual, z_hat_star,
// m_bar) exist only when theta < 0.  The regime flag says which case holds;
// in the immediate regime those fields are not meaningful and the checked
// accessors below refuse to hand them out.
template <class T>
struct DerivedConstantsT {
    // unconditional
    T kappa_mpr;   // market price of risk, (mu_S - mu_R)/sigma_S
    T delta_hat;   // effective discount rate, delta + lambda
    T phi;         // optimal excess-consumption rate out of disposable capital
    T Gamma;       // utility scale, post-retrofit prices
    T Gamma_hat;   // utility scale, existing-state prices (dual scale Phi)
    T H;           // human capital net of subsistence, existing state, EUR
    T H_tilde;     // same, post-retrofit (income net of loan service), EUR
    T theta;       // retrofit premium H_tilde - H, EUR
    T mu_Z;        // drift of disposable capital under the optimal policy
    T sigma_Z;     // volatility of disposable capital, kappa/gamma
    T a0;          // positive root of the stopping quadratic
    T kappa_Q;     // backfire threshold scale, EUR
    T B0;          // subsistence-saving NPV, (1/eta - 1/eta_tilde) s_sub P_ann / mu_R
    T B1;          // loan-service NPV per EUR of cost, rho/mu_R
    T P_ann;       // annualised watt price, EUR/(W year)
    T price_existing;  // implicit service price P_ann/eta, EUR/(degC year)
    T price_retrofit;  // implicit service price P_ann/eta_tilde, EUR/(degC year)

    // regime
    Regime theta_regime = Regime::Waiting; // ImmediateInvest iff theta >= 0

    // waiting regime only (theta < 0); zero-initialised otherwise
    T Lambda = T(0);         // threshold multiplier, z_star = Lambda * theta
    T z_star = T(0);         // disposable-capital investment threshold, EUR
    T w_star = T(0);         // wealth investment threshold z_star - H, EUR
    T A0_dual = T(0);        // coefficient of the option term in the dual value
    T z_hat_star = T(0);     // dual variable at the free boundary
    T log_z_hat_star = T(0); // its logarithm (the boundary is ~1e-19; work in logs)
    T m_bar = T(0);          // largest admissible subsidy rate, 1 - B0/(B1 K)

    bool waiting() const { return theta_regime == Regime::Waiting; }
};

using DerivedConstants = DerivedConstantsT<double>;

// Checked accessors for waiting-regime constants.
template <class T>
T require_waiting(const DerivedConstantsT<T>& d, const T& field, const char* name) {
    if (!d.waiting())
        throw RegimeError(std::string(name) +
                          " exists only in the waiting regime (retrofit premium is non-negative)");
    return field;
}

inline double z_star_of(const DerivedConstants& d) { return require_waiting(d, d.z_star, "z_star"); }
inline double w_star_of(const DerivedConstants& d) { return require_waiting(d, d.w_star, "w_star"); }

// Regime classification of an agent with disposable capital z = w + H:
// invest immediately iff the premium is non-negative or z already meets the
// threshold; otherwise wait.
template <class T>
Regime regime_at(const DerivedConstantsT<T>& d, T z) {
    if (!d.waiting()) return Regime::ImmediateInvest;
    return z >= d.z_star ? Regime::ImmediateInvest : Regime::Waiting;
}

// The full closed-form chain.  Throws DomainError for inputs on which the
// model is not defined at all; a non-negative premium theta is NOT an error
// (the regime flag reports it and waiting-only fields stay unset).
template <class T>
DerivedConstantsT<T> derive_constants(const ModelParamsT<T>& p) {
    using std::exp;
    using std::log;
    using std::pow;
    using std::sqrt;
    using math::value_of;

    const auto& mk = p.market;
    const auto& ag = p.agent;
    const auto& rf = p.retrofit;

    if (value_of(mk.sigma_S) <= 0.0) throw DomainError("derive_constants: sigma_S must be positive");
    if (value_of(mk.mu_R) <= 0.0) throw DomainError("derive_constants: mu_R must be positive");
    if (value_of(mk.P) <= 0.0) throw DomainError("derive_constants: P must be positive");
    if (value_of(ag.gamma) <= 1.0) throw DomainError("derive_constants: gamma must exceed 1");
    if (!(value_of(ag.beta) > 0.0 && value_of(ag.beta) < 1.0))
        throw DomainError("derive_constants: beta must lie in (0,1)");
    if (value_of(rf.eta) <= 0.0 || value_of(rf.eta_tilde) <= 0.0)
        throw DomainError("derive_constants: efficiencies must be positive");
    if (value_of(rf.eta_tilde) <= value_of(rf.eta))
        throw DomainError("derive_constants: retrofit must strictly improve efficiency");
    if (p.units.hours_per_year <= 0.0)
        throw DomainError("derive_constants: hours_per_year must be positive");

    DerivedConstantsT<T> d;

    d.kappa_mpr = (mk.mu_S - mk.mu_R) / mk.sigma_S;
    d.delta_hat = ag.delta + ag.lambda_;

    const T gamma = ag.gamma;
    const T one_m_gamma = T(1) - gamma;
    const T gamma_hat = one_m_gamma / gamma; // (1-gamma)/gamma, negative here

    // Merton consumption rate out of disposable capital.  Positivity is a
    // well-posedness requirement: with phi <= 0 the lifetime value diverges.
    d.phi = (d.delta_hat - one_m_gamma * (mk.mu_R + d.kappa_mpr * d.kappa_mpr / (T(2) * gamma))) / gamma;
    if (value_of(d.phi) <= 0.0)
        throw DomainError("derive_constants: consumption rate phi must be positive "
                          "(discounting too weak relative to investment opportunities)");

    d.mu_Z = d.kappa_mpr * d.kappa_mpr / gamma + mk.mu_R - d.phi;
    d.sigma_Z = d.kappa_mpr / gamma;

    d.P_ann = mk.P * T(p.units.hours_per_year * UnitConventions::watt_to_kilowatt);
    d.price_existing = d.P_ann / rf.eta;
    d.price_retrofit = d.P_ann / rf.eta_tilde;

    // Utility scales at the two price levels:
    //   Gamma(price) = phi * ((price/beta)^beta / (1-beta)^(1-beta))^((1-gamma)/gamma).
    // Since eta_tilde > eta the retrofit price is lower, and with gamma > 1
    // the exponent is negative, so Gamma (retrofit) > Gamma_hat (existing).
    const auto scale_at = [&](T price) {
        const T log_cm = ag.beta * log(price / ag.beta) - (T(1) - ag.beta) * log(T(1) - ag.beta);
        return d.phi * exp(gamma_hat * log_cm);
    };
    d.Gamma = scale_at(d.price_retrofit);
    d.Gamma_hat = scale_at(d.price_existing);

    d.H = (ag.Y - ag.x_sub - ag.s_sub * d.price_existing) / mk.mu_R;
    d.H_tilde = (ag.Y - rf.rho * rf.K - ag.x_sub - ag.s_sub * d.price_retrofit) / mk.mu_R;
    d.theta = d.H_tilde - d.H;
    d.B0 = (T(1) / rf.eta - T(1) / rf.eta_tilde) * ag.s_sub * d.P_ann / mk.mu_R;
    d.B1 = rf.rho / mk.mu_R;

    // Positive root of (kappa^2/2) a (a+1) - (delta_hat - mu_R) a - delta_hat = 0.
    // The constant term is -delta_hat < 0, so the roots straddle zero and the
    // positive one always exists.
    {
        const T A = d.kappa_mpr * d.kappa_mpr / T(2);
        const T b = A - d.delta_hat + mk.mu_R;
        d.a0 = (-b + sqrt(b * b + T(4) * A * d.delta_hat)) / (T(2) * A);
    }

    d.kappa_Q = (T(1) / rf.eta - T(1) / rf.eta_tilde) * ag.s_sub * d.P_ann / (ag.beta * d.phi);

    d.theta_regime = value_of(d.theta) < 0.0 ? Regime::Waiting : Regime::ImmediateInvest;
    if (d.theta_regime == Regime::Waiting) {
        // Threshold multiplier.  ehat = (eta_tilde/eta)^(beta (1-gamma)/gamma)
        // lies in (0,1) here, so ehat - 1 < 0 and Lambda < 0; with theta < 0
        // the threshold z_star = Lambda theta is positive.
        const T ehat = exp(ag.beta * gamma_hat * log(rf.eta_tilde / rf.eta));
        const T denom = d.a0 * gamma + gamma - T(1);
        d.Lambda = ((T(1) + d.a0) * (gamma - T(1)) / (ehat - T(1)) - d.a0) / denom;
        d.z_star = d.Lambda * d.theta;
        d.w_star = d.z_star - d.H;
        d.m_bar = T(1) - d.B0 / (d.B1 * rf.K);

        // Dual free boundary.  From value matching and smooth pasting,
        //   z_hat_star^(-1/gamma)
        //     = theta (1+a0)(gamma-1) Gamma Phi / ((Phi - Gamma)(a0 gamma + gamma - 1)),
        // with Phi = Gamma_hat.  Both theta < 0 and Phi - Gamma < 0, so the
        // ratio is positive.  z_hat_star is of order Gamma^-gamma z_star^-gamma
        // (~1e-19 at case-study scale), hence the log form.
        const T Phi = d.Gamma_hat;
        const T X = d.theta * (T(1) + d.a0) * (gamma - T(1)) * d.Gamma * Phi /
                    ((Phi - d.Gamma) * denom);
        if (value_of(X) <= 0.0)
            throw NumericError("derive_constants: dual boundary scale must be positive");
        d.log_z_hat_star = -gamma * log(X);
        d.z_hat_star = exp(d.log_z_hat_star);

        // Option coefficient: A0 = (1/Gamma - 1/Phi) u_hat(z_hat_star) + theta z_hat_star
        // with u_hat(zh) = (gamma/(1-gamma)) zh^((gamma-1)/gamma).
        const T u_hat_star = gamma / one_m_gamma * exp((gamma - T(1)) / gamma * d.log_z_hat_star);
        d.A0_dual = (T(1) / d.Gamma - T(1) / Phi) * u_hat_star + d.theta * d.z_hat_star;
    }

    return d;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationCheck {
    std::string name;   // short identifier of the constraint
    bool pass = false;
    double margin = 0.0; // signed distance to the constraint boundary (>0 pass)
    std::string detail; // human-readable restatement with numbers
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool ok = false; // all checks passed

    const ValidationCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// Checks every model constraint and reports pass/fail with margins.  Never
// throws: checks whose prerequisites fail are reported as failed with a note.
inline ValidationReport validate(const ModelParams& p) {
    ValidationReport rep;
    const auto add = [&](std::string name, bool pass, double margin, std::string detail) {
        rep.checks.push_back({std::move(name), pass, margin, std::move(detail)});
    };
    const auto& mk = p.market;
    const auto& ag = p.agent;
    const auto& rf = p.retrofit;

    add("sigma_S_positive", mk.sigma_S > 0.0, mk.sigma_S,
        "risky-asset volatility " + std::to_string(mk.sigma_S) + " must be > 0");
    add("mu_R_positive", mk.mu_R > 0.0, mk.mu_R,
        "risk-free rate " + std::to_string(mk.mu_R) + " must be > 0");
    add("equity_premium_positive", mk.mu_S > mk.mu_R, mk.mu_S - mk.mu_R,
        "risky drift must exceed the risk-free rate");
    add("price_positive", mk.P > 0.0, mk.P, "energy price must be > 0");
    add("gamma_above_one", ag.gamma > 1.0, ag.gamma - 1.0,
        "risk aversion " + std::to_string(ag.gamma) + " must exceed 1");
    add("beta_in_unit_interval", ag.beta > 0.0 && ag.beta < 1.0,
        std::min(ag.beta, 1.0 - ag.beta), "service weight must lie in (0,1)");
    add("delta_positive", ag.delta > 0.0, ag.delta, "discount rate must be > 0");
    add("lambda_nonnegative", ag.lambda_ >= 0.0, ag.lambda_, "hazard rate must be >= 0");
    add("subsistence_positive", ag.x_sub > 0.0 && ag.s_sub > 0.0,
        std::min(ag.x_sub, ag.s_sub), "subsistence levels must be > 0");
    add("income_positive", ag.Y > 0.0, ag.Y, "labour income must be > 0");
    add("efficiency_ordering", rf.eta_tilde > rf.eta && rf.eta > 0.0,
        rf.eta_tilde - rf.eta, "retrofit must strictly improve a positive efficiency");
    add("retrofit_cost_positive", rf.K > 0.0, rf.K, "retrofit cost must be > 0");
    add("borrowing_rate_positive", rf.rho > 0.0, rf.rho, "borrowing rate must be > 0");
    add("area_positive", rf.A > 0.0, rf.A, "floor area must be > 0");
    add("hours_in_band",
        p.units.hours_per_year >= 8600.0 && p.units.hours_per_year <= 8800.0,
        std::min(p.units.hours_per_year - 8600.0, 8800.0 - p.units.hours_per_year),
        "hours_per_year " + std::to_string(p.units.hours_per_year) +
            " must lie in [8600, 8800]");

    bool prereq = true;
    for (const auto& c : rep.checks) prereq = prereq && c.pass;
    // hours band and equity premium are soft relative to the derivations below
    const bool derivable = mk.sigma_S > 0.0 && mk.mu_R > 0.0 && mk.P > 0.0 &&
                           ag.gamma > 1.0 && ag.beta > 0.0 && ag.beta < 1.0 &&
                           rf.eta > 0.0 && rf.eta_tilde > rf.eta &&
                           p.units.hours_per_year > 0.0;

    if (!derivable) {
        add("phi_positive", false, 0.0, "not evaluated: prerequisites failed");
        add("patience", false, 0.0, "not evaluated: prerequisites failed");
        add("subsistence_affordable_existing", false, 0.0, "not evaluated: prerequisites failed");
        add("subsistence_affordable_retrofit", false, 0.0, "not evaluated: prerequisites failed");
        add("utility_scale_ordering", false, 0.0, "not evaluated: prerequisites failed");
    } else {
        const double kappa = (mk.mu_S - mk.mu_R) / mk.sigma_S;
        const double delta_hat = ag.delta + ag.lambda_;
        const double phi =
            (delta_hat - (1.0 - ag.gamma) * (mk.mu_R + kappa * kappa / (2.0 * ag.gamma))) / ag.gamma;
        add("phi_positive", phi > 0.0, phi,
            "excess-consumption rate phi = " + std::to_string(phi) + " must be > 0");

        // Patience: delta_hat < (kappa^2 + 2 mu_R)/2, equivalently the
        // log-drift of disposable capital mu_Z - sigma_Z^2/2 is positive, so
        // the investment threshold is reached almost surely.
        const double bound = 0.5 * (kappa * kappa + 2.0 * mk.mu_R);
        add("patience", delta_hat < bound, bound - delta_hat,
            "effective discount rate " + std::to_string(delta_hat) +
                " must stay below " + std::to_string(bound));

        const double P_ann = mk.P * p.units.hours_per_year * UnitConventions::watt_to_kilowatt;
        const double slack_existing = ag.Y - ag.x_sub - ag.s_sub * P_ann / rf.eta;
        add("subsistence_affordable_existing", slack_existing > 0.0, slack_existing,
            "income must cover subsistence at the existing efficiency (H > 0)");
        const double slack_retrofit =
            ag.Y - rf.rho * rf.K - ag.x_sub - ag.s_sub * P_ann / rf.eta_tilde;
        add("subsistence_affordable_retrofit", slack_retrofit > 0.0, slack_retrofit,
            "income net of loan service must cover subsistence post-retrofit (H_tilde > 0)");

        if (phi > 0.0) {
            const double gamma_hat = (1.0 - ag.gamma) / ag.gamma;
            const auto scale_at = [&](double price) {
                const double log_cm = ag.beta * std::log(price / ag.beta) -
                                      (1.0 - ag.beta) * std::log(1.0 - ag.beta);
                return phi * std::exp(gamma_hat * log_cm);
            };
            const double G = scale_at(P_ann / rf.eta_tilde);
            const double Gh = scale_at(P_ann / rf.eta);
            add("utility_scale_ordering", G > Gh && Gh > 0.0, G - Gh,
                "post-retrofit utility scale must exceed the existing-state scale");
        } else {
            add("utility_scale_ordering", false, 0.0, "not evaluated: phi <= 0");
        }
    }

    rep.ok = true;
    for (const auto& c : rep.checks) rep.ok = rep.ok && c.pass;
    return rep;
}

} // namespace retrofit::params
