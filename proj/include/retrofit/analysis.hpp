// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "retrofit/common.hpp"
#include "retrofit/math.hpp"
#include "retrofit/params.hpp"
#include "retrofit/solution.hpp"
#include "retrofit/subsidy.hpp"
#include "retrofit/welfare.hpp"

// Comparative statics and design studies.
//
//  * Elasticities of the investment threshold w* (closed form: a dual number
//    seeded on the parameter is pushed through the whole derivation chain,
//    including the market price of risk and the option exponent, so no
//    finite-difference error enters).
//  * Elasticities of the optimal subsidy m* (central differences with one
//    Richardson extrapolation step; the inner optimum is pinned by its
//    first-order condition, so the differences are noise-free).
//  * Accuracy of the constant-consumption approximation to the waiting
//    policy over the whole waiting region.
//  * Retrofit-depth design: fit an efficiency-vs-cost menu with a logistic
//    curve and locate the cost that maximises household value and total
//    welfare along it.

namespace retrofit::analysis {

using params::DerivedConstants;
using params::ModelParams;

// ---------------------------------------------------------------------------
// Elasticities
// ---------------------------------------------------------------------------

struct ElasticityEntry {
    std::string param;  // canonical parameter key
    std::string target; // "w_star" or "m_star"
    std::string method; // "closed_form_derivative" or "central_difference_richardson"
    double value;       // d log(target) / d log(param)
};

// Parameters the threshold responds to, in reporting order.
inline const std::vector<std::string>& w_star_params() {
    static const std::vector<std::string> v = {"mu_R", "mu_S", "sigma_S", "P",   "Y",
                                               "beta", "gamma", "delta",  "lambda",
                                               "x_sub", "s_sub", "eta",   "eta_tilde",
                                               "rho",  "K"};
    return v;
}

// Parameters the optimal subsidy responds to, in reporting order.
inline const std::vector<std::string>& m_star_params() {
    static const std::vector<std::string> v = {
        "mu_R",  "mu_S",  "sigma_S", "P",   "Y",   "w",         "beta",
        "gamma", "delta", "lambda",  "x_sub", "s_sub", "eta",   "eta_tilde",
        "rho",   "K",     "epsilon", "pi",  "mu_pi", "xi0",     "xi1"};
    return v;
}

namespace detail {

template <class T>
inline T& model_field(params::ModelParamsT<T>& m, const std::string& name) {
    if (name == "mu_R") return m.market.mu_R;
    if (name == "mu_S") return m.market.mu_S;
    if (name == "sigma_S") return m.market.sigma_S;
    if (name == "P") return m.market.P;
    if (name == "beta") return m.agent.beta;
    if (name == "gamma") return m.agent.gamma;
    if (name == "delta") return m.agent.delta;
    if (name == "lambda") return m.agent.lambda_;
    if (name == "x_sub") return m.agent.x_sub;
    if (name == "s_sub") return m.agent.s_sub;
    if (name == "Y") return m.agent.Y;
    if (name == "w") return m.agent.w0;
    if (name == "eta") return m.retrofit.eta;
    if (name == "eta_tilde") return m.retrofit.eta_tilde;
    if (name == "rho") return m.retrofit.rho;
    if (name == "K") return m.retrofit.K;
    throw ConfigError("unknown model parameter: " + name);
}

inline params::ModelParamsT<math::Dual> lift(const ModelParams& p) {
    params::ModelParamsT<math::Dual> out;
    out.market = {math::Dual{p.market.mu_R}, math::Dual{p.market.mu_S},
                  math::Dual{p.market.sigma_S}, math::Dual{p.market.P}};
    out.agent = {math::Dual{p.agent.beta},   math::Dual{p.agent.gamma},
                 math::Dual{p.agent.delta},  math::Dual{p.agent.lambda_},
                 math::Dual{p.agent.x_sub},  math::Dual{p.agent.s_sub},
                 math::Dual{p.agent.Y},      math::Dual{p.agent.w0}};
    out.retrofit = {math::Dual{p.retrofit.eta}, math::Dual{p.retrofit.eta_tilde},
                    math::Dual{p.retrofit.rho}, math::Dual{p.retrofit.K},
                    math::Dual{p.retrofit.A}};
    out.units = p.units;
    return out;
}

} // namespace detail

// Elasticity of the investment threshold w* with respect to one parameter.
// Exact: forward-mode differentiation through the full derivation chain.
inline ElasticityEntry elasticity_w_star(const ModelParams& p, const std::string& name) {
    auto lifted = detail::lift(p);
    math::Dual& field = detail::model_field(lifted, name);
    if (field.v == 0.0)
        throw DomainError("elasticity of w_star undefined at a zero parameter value: " + name);
    field.d = 1.0;
    const auto d = params::derive_constants(lifted);
    if (d.theta_regime != Regime::Waiting)
        throw RegimeError("elasticity of w_star undefined: no waiting region (theta >= 0)");
    const double w0 = d.w_star.v;
    if (w0 == 0.0) throw DomainError("elasticity of w_star undefined: threshold is zero");
    return {name, "w_star", "closed_form_derivative", field.v / w0 * d.w_star.d};
}

// One planner problem: the agent model plus the social and fiscal side.
struct Problem {
    ModelParams model;
    subsidy::PlannerParams planner;
};

namespace detail {

inline double& problem_field(Problem& pr, const std::string& name) {
    if (name == "epsilon") return pr.planner.social.epsilon;
    if (name == "pi") return pr.planner.social.carbon_price; // social cost scales with it
    if (name == "mu_pi") return pr.planner.social.mu_varpi;
    if (name == "xi0") return pr.planner.xi0;
    if (name == "xi1") return pr.planner.xi1;
    return model_field(pr.model, name);
}

inline double m_star_of(const Problem& pr) {
    const auto d = params::derive_constants(pr.model);
    const double z = pr.model.agent.w0 + d.H;
    if (params::regime_at(d, z) != Regime::Waiting)
        throw RegimeError("agent not in the waiting regime");
    const auto res = subsidy::optimal_subsidy_waiting(pr.model, d, pr.planner, z);
    if (res.boundary_hit)
        throw RegimeError("optimal subsidy sits on a boundary of [0, m_bar]");
    return res.m_star;
}

} // namespace detail

// Elasticity of the waiting-regime optimal subsidy m* with respect to one
// parameter.  Central differences with step 1e-4 |v| and one Richardson
// step.  If any stencil point leaves the waiting regime or pushes the
// optimum onto a boundary, the elasticity is undefined and a domain error
// names the parameter.
inline ElasticityEntry elasticity_m_star(const ModelParams& p,
                                         const subsidy::PlannerParams& pl,
                                         const std::string& name) {
    Problem base{p, pl};
    const double v0 = detail::problem_field(base, name);
    if (v0 == 0.0)
        throw DomainError("elasticity of m_star undefined at a zero parameter value: " + name);
    try {
        const double m0 = detail::m_star_of(base);
        if (m0 == 0.0)
            throw DomainError("elasticity of m_star undefined: optimal subsidy is zero");
        const auto f = [&](double v) {
            Problem pr = base;
            detail::problem_field(pr, name) = v;
            return detail::m_star_of(pr);
        };
        const double h = 1e-4 * std::fabs(v0);
        const double deriv = math::richardson_derivative(f, v0, h);
        return {name, "m_star", "central_difference_richardson", v0 / m0 * deriv};
    } catch (const RegimeError& e) {
        throw DomainError("elasticity undefined across regime boundary for parameter '" + name +
                          "': " + e.what());
    }
}

// The full table: threshold elasticities for every structural parameter,
// subsidy elasticities for those plus wealth and the planner's parameters.
inline std::vector<ElasticityEntry> elasticity_table(const ModelParams& p,
                                                     const subsidy::PlannerParams& pl) {
    std::vector<ElasticityEntry> out;
    for (const auto& name : w_star_params()) out.push_back(elasticity_w_star(p, name));
    for (const auto& name : m_star_params()) out.push_back(elasticity_m_star(p, pl, name));
    return out;
}

// ---------------------------------------------------------------------------
// Accuracy of the constant-consumption approximation
// ---------------------------------------------------------------------------

struct ApproxErrorStudy {
    std::vector<double> w;     // grid on [0, w_star]
    std::vector<double> err_a; // relative error in risky holdings (approx - exact)/exact
    std::vector<double> err_x; // relative error in non-energy consumption
    std::vector<double> err_s; // relative error in energy service
    double max_abs_err_a = 0.0, max_abs_err_x = 0.0, max_abs_err_s = 0.0;
    bool a_under = true; // approximation understates risky holdings everywhere
    bool x_over = true;  // and overstates both consumption goods everywhere
    bool s_over = true;
};

// Compare the approximate policy (run the no-retrofit controls until the
// threshold) with the exact waiting-region controls on an n-point wealth
// grid covering the whole waiting region [0, w*].  The risky-asset error is
// measured on holdings a w, which stays finite at w = 0.
inline ApproxErrorStudy approximation_error_study(const ModelParams& p,
                                                  const DerivedConstants& d, int n = 201) {
    params::require_waiting(d, d.z_star, "approximation_error_study");
    if (n < 2) throw ConfigError("approximation_error_study: need at least 2 grid points");
    ApproxErrorStudy out;
    for (int i = 0; i < n; ++i) {
        const double w = d.w_star * static_cast<double>(i) / (n - 1);
        const double z = w + d.H;
        // exact controls; holdings computed directly so w = 0 is admissible
        const double log_zh = solution::invert_marginal_log(p, d, z);
        const double zh = std::exp(log_zh);
        const auto du = solution::dual_utility(zh, d.price_existing * zh, p.agent);
        const double hold_exact =
            d.kappa_mpr / p.market.sigma_S * zh * solution::dual_second_log(p, d, log_zh);
        // approximate controls (no-retrofit policy at the same state)
        const double hold_approx = d.kappa_mpr / (p.agent.gamma * p.market.sigma_S) * z;
        const double x_approx = p.agent.x_sub + (1.0 - p.agent.beta) * d.phi * z;
        const double s_approx = p.agent.s_sub + p.agent.beta * d.phi * z / d.price_existing;

        const double ea = (hold_approx - hold_exact) / hold_exact;
        const double ex = (x_approx - du.b0) / du.b0;
        const double es = (s_approx - du.b1) / du.b1;
        out.w.push_back(w);
        out.err_a.push_back(ea);
        out.err_x.push_back(ex);
        out.err_s.push_back(es);
        out.max_abs_err_a = std::max(out.max_abs_err_a, std::fabs(ea));
        out.max_abs_err_x = std::max(out.max_abs_err_x, std::fabs(ex));
        out.max_abs_err_s = std::max(out.max_abs_err_s, std::fabs(es));
        if (ea > 0.0) out.a_under = false;
        if (ex < 0.0) out.x_over = false;
        if (es < 0.0) out.s_over = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Retrofit depth
// ---------------------------------------------------------------------------

struct DepthPoint {
    double K_ee;      // incremental cost of the efficiency package, EUR
    double eta_tilde; // efficiency it buys
};

struct LogisticFit {
    double L = 0.0;  // saturation efficiency
    double k = 0.0;  // steepness, 1/EUR
    double x0 = 0.0; // half-saturation cost, EUR
    bool ok = false; // every observed point reproduced within 5%
    double max_rel_err = 0.0;
    double operator()(double K_ee) const { return L / (1.0 + std::exp(-k * (K_ee - x0))); }
};

namespace detail {

// Solve a 3x3 linear system in place (partial pivoting).
inline std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> A,
                                    std::array<double, 3> b) {
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        if (A[c][c] == 0.0) throw NumericError("logistic fit: singular normal equations");
        for (int r = c + 1; r < 3; ++r) {
            const double f = A[r][c] / A[c][c];
            for (int cc = c; cc < 3; ++cc) A[r][cc] -= f * A[c][cc];
            b[r] -= f * b[c];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double acc = b[r];
        for (int cc = r + 1; cc < 3; ++cc) acc -= A[r][cc] * x[cc];
        x[r] = acc / A[r][r];
    }
    return x;
}

} // namespace detail

// Fit eta_tilde(K_ee) = L / (1 + exp(-k (K_ee - x0))) by damped Gauss-Newton
// (Levenberg style).  Costs are scaled to kEUR internally for conditioning.
inline LogisticFit fit_logistic(const std::vector<DepthPoint>& pts) {
    if (pts.size() < 3)
        throw ConfigError("logistic fit: need at least 3 (cost, efficiency) points");
    const double scale = 1e-3; // EUR -> kEUR
    std::vector<double> xs, ys;
    for (const auto& pt : pts) {
        if (pt.K_ee <= 0.0 || pt.eta_tilde <= 0.0)
            throw ConfigError("logistic fit: costs and efficiencies must be positive");
        xs.push_back(pt.K_ee * scale);
        ys.push_back(pt.eta_tilde);
    }
    const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    double L = 1.05 * *ymax_it;
    double x0 = 0.5 * (*xmin_it + *xmax_it);
    double k = 4.0 * (*ymax_it - *ymin_it) / ((*xmax_it - *xmin_it) * L);

    const auto sse_of = [&](double L_, double k_, double x0_) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double f = L_ / (1.0 + std::exp(-k_ * (xs[i] - x0_)));
            s += (f - ys[i]) * (f - ys[i]);
        }
        return s;
    };
    double damping = 1e-3;
    double sse = sse_of(L, k, x0);
    for (int it = 0; it < 500; ++it) {
        std::array<std::array<double, 3>, 3> JtJ{};
        std::array<double, 3> Jtr{};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double f = L / (1.0 + std::exp(-k * (xs[i] - x0)));
            const double r = f - ys[i];
            const double g = f * (1.0 - f / L); // logistic slope factor
            const std::array<double, 3> J{f / L, g * (xs[i] - x0), -g * k};
            for (int a = 0; a < 3; ++a) {
                Jtr[a] += J[a] * r;
                for (int b = 0; b < 3; ++b) JtJ[a][b] += J[a] * J[b];
            }
        }
        auto damped = JtJ;
        for (int a = 0; a < 3; ++a) damped[a][a] += damping * (JtJ[a][a] + 1e-12);
        std::array<double, 3> step;
        try {
            step = detail::solve3(damped, {-Jtr[0], -Jtr[1], -Jtr[2]});
        } catch (const NumericError&) {
            damping *= 10.0;
            continue;
        }
        const double Ln = L + step[0], kn = k + step[1], x0n = x0 + step[2];
        if (Ln <= 0.0 || !std::isfinite(Ln + kn + x0n)) {
            damping *= 10.0;
            continue;
        }
        const double sse_n = sse_of(Ln, kn, x0n);
        if (sse_n < sse) {
            const double rel_step = std::fabs(step[0] / L) + std::fabs(step[1]) +
                                    std::fabs(step[2] / (std::fabs(x0) + 1.0));
            L = Ln;
            k = kn;
            x0 = x0n;
            sse = sse_n;
            damping = std::max(damping * 0.5, 1e-12);
            if (rel_step < 1e-12 || sse < 1e-24) break;
        } else {
            damping *= 10.0;
            if (damping > 1e12) break;
        }
    }
    LogisticFit fit;
    fit.L = L;
    fit.k = k * scale; // back to 1/EUR
    fit.x0 = x0 / scale;
    fit.max_rel_err = 0.0;
    for (const auto& pt : pts)
        fit.max_rel_err =
            std::max(fit.max_rel_err, std::fabs(fit(pt.K_ee) - pt.eta_tilde) / pt.eta_tilde);
    fit.ok = fit.max_rel_err <= 0.05;
    return fit;
}

struct DepthStudy {
    double K_min;                  // cost floor of the baseline renovation, EUR
    std::vector<DepthPoint> menu;  // observed (incremental cost, efficiency) menu
    LogisticFit fit;               // efficiency-vs-cost curve
    std::vector<double> grid_K;    // total costs along the curve
    std::vector<double> grid_F;    // household value at each total cost
    std::vector<double> grid_V;    // total welfare change at each total cost
    double K_star_F = 0.0;         // total cost maximising household value
    double K_star_V = 0.0;         // total cost maximising total welfare
};

// Sweep retrofit depth along the fitted menu: each incremental cost K_ee
// buys efficiency fit(K_ee) at total cost K_min + K_ee.  The household value
// F(w) and the total welfare change (equivalent variation net of social
// cost) are profiled over the observed cost range and both argmaxes refined
// by golden section.
inline DepthStudy retrofit_depth(const ModelParams& base, double K_min,
                                 const std::vector<DepthPoint>& menu,
                                 const welfare::SocialParams& social, int n_grid = 200) {
    if (K_min < 0.0) throw ConfigError("retrofit depth: negative cost floor");
    if (n_grid < 8) throw ConfigError("retrofit depth: grid too coarse");
    DepthStudy out;
    out.K_min = K_min;
    out.menu = menu;
    out.fit = fit_logistic(menu);

    double lo = menu.front().K_ee, hi = menu.front().K_ee;
    for (const auto& pt : menu) {
        lo = std::min(lo, pt.K_ee);
        hi = std::max(hi, pt.K_ee);
    }

    const auto value_at = [&](double K_ee, bool welfare_gain) {
        ModelParams m = base;
        m.retrofit.K = K_min + K_ee;
        m.retrofit.eta_tilde = out.fit(K_ee);
        const auto d = params::derive_constants(m);
        return welfare_gain ? welfare::total_welfare(m, d, social, m.agent.w0).V_total
                            : solution::primal_value(m, d, m.agent.w0);
    };

    int best_F = 0, best_V = 0;
    for (int i = 0; i <= n_grid; ++i) {
        const double K_ee = lo + (hi - lo) * static_cast<double>(i) / n_grid;
        const double F = value_at(K_ee, false);
        const double V = value_at(K_ee, true);
        out.grid_K.push_back(K_min + K_ee);
        out.grid_F.push_back(F);
        out.grid_V.push_back(V);
        if (F > out.grid_F[best_F]) best_F = i;
        if (V > out.grid_V[best_V]) best_V = i;
    }
    const auto refine = [&](int best, bool welfare_gain) {
        const double cell = (hi - lo) / n_grid;
        const double a = std::max(lo, lo + cell * (best - 1));
        const double b = std::min(hi, lo + cell * (best + 1));
        const auto neg = [&](double K_ee) { return -value_at(K_ee, welfare_gain); };
        return K_min + math::golden_min(neg, a, b, 1e-6);
    };
    out.K_star_F = refine(best_F, false);
    out.K_star_V = refine(best_V, true);
    return out;
}

} // namespace retrofit::analysis
