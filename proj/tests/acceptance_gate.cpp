// Acceptance gate: one pass/fail line per criterion of the project's
// acceptance checklist, each timed against its runtime budget.
//
// The elasticity-table criterion (4) is EXPECTED to fail on two magnitude
// cells (m*/s_sub and m*/eta) where the computed values sit outside the
// published reference band; every sign and the other 34 cells agree.  The
// gate exits zero only when the observed outcome matches that documented
// state exactly — any drift, whether a new failure or an unexpected pass,
// turns the gate red.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <retrofit/config.hpp>

#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace retrofit;
namespace oc = retrofit::oracle;

namespace {

std::string num(double v, const char* fmt = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

struct CriterionResult {
    bool pass = true;
    std::string detail;

    void require(bool cond, const std::string& why) {
        if (!cond) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
};

// --------------------------------------------------------------------------
// 1. case-study constants
// --------------------------------------------------------------------------
CriterionResult criterion1() {
    const auto p = testsupport::case_model();
    const auto d = params::derive_constants(p);
    CriterionResult r;
    const double theta_k = d.theta / 1000.0;
    const double wstar_k = d.w_star / 1000.0;
    r.require(theta_k > -17.8 && theta_k < -14.6,
              "theta " + num(theta_k) + " kEUR outside [-17.8, -14.6]");
    r.require(wstar_k > 408.0 && wstar_k < 452.0,
              "w* " + num(wstar_k) + " kEUR outside [408, 452]");
    if (r.pass)
        r.detail = "theta " + num(theta_k) + " kEUR in [-17.8, -14.6], w* " + num(wstar_k) +
                   " kEUR in [408, 452]";
    return r;
}

// --------------------------------------------------------------------------
// 2. immediate-regime penalty rate
// --------------------------------------------------------------------------
CriterionResult criterion2() {
    const auto p = testsupport::case_model();
    const auto d = params::derive_constants(p);
    const double z_hi = 2.0 * d.z_star;
    CriterionResult r;
    double lo = 0.0, hi = -100.0;
    for (const double carbon : {10.0, 25.0, 45.0, 70.0}) {
        const auto res =
            subsidy::optimal_subsidy_immediate(p, d, testsupport::planner_at_carbon(carbon), z_hi);
        const double pct = 100.0 * res.m_star;
        lo = std::min(lo, pct);
        hi = std::max(hi, pct);
        r.require(pct > -1.91 && pct < -1.61,
                  "carbon " + num(carbon) + ": levy " + num(pct) + "% outside -1.76% +- 0.15pp");
    }
    if (r.pass)
        r.detail = "levy " + num(lo) + "% .. " + num(hi) +
                   "% across carbon 10-70 EUR/tC (target -1.76% +- 0.15pp)";
    return r;
}

// --------------------------------------------------------------------------
// 3. subsidy surface
// --------------------------------------------------------------------------
CriterionResult criterion3() {
    const auto p = testsupport::case_model();
    const auto d = params::derive_constants(p);
    CriterionResult r;

    std::vector<double> ws, cs;
    for (int i = 0; i < 10; ++i)
        ws.push_back(45000.0 + (0.9 * d.w_star - 45000.0) * i / 9.0);
    for (int j = 0; j < 7; ++j) cs.push_back(10.0 + 10.0 * j);

    std::vector<std::vector<double>> m(ws.size(), std::vector<double>(cs.size()));
    double m_max = 0.0, w_at = 0.0, c_at = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i)
        for (std::size_t j = 0; j < cs.size(); ++j) {
            const auto res = subsidy::optimal_subsidy_waiting(
                p, d, testsupport::planner_at_carbon(cs[j]), ws[i] + d.H);
            m[i][j] = res.m_star;
            if (res.m_star > m_max) {
                m_max = res.m_star;
                w_at = ws[i];
                c_at = cs[j];
            }
            r.require(res.m_star >= 0.0 && res.m_star <= 0.02,
                      "m* " + num(100.0 * res.m_star) + "% outside [0, 2%] at w=" + num(ws[i]) +
                          ", carbon=" + num(cs[j]));
        }
    for (std::size_t i = 0; i < ws.size(); ++i)
        for (std::size_t j = 0; j + 1 < cs.size(); ++j)
            r.require(m[i][j + 1] >= m[i][j] - 1e-10,
                      "m* not increasing in carbon at w=" + num(ws[i]));
    for (std::size_t j = 0; j < cs.size(); ++j)
        for (std::size_t i = 0; i + 1 < ws.size(); ++i)
            r.require(m[i + 1][j] <= m[i][j] + 1e-10,
                      "m* not weakly decreasing in wealth at carbon=" + num(cs[j]));
    r.require(m_max >= 0.01 && m_max <= 0.02,
              "max m* " + num(100.0 * m_max) + "% outside 1.5% +- 0.5pp");
    if (r.pass)
        r.detail = "m* in [0, 2%], monotone in carbon and wealth; max " + num(100.0 * m_max) +
                   "% at w=" + num(w_at) + ", carbon=" + num(c_at);
    return r;
}

// --------------------------------------------------------------------------
// 4. elasticity table vs the printed reference
// --------------------------------------------------------------------------
std::vector<std::string> g_c4_band_failures;
bool g_c4_signs_ok = false;

CriterionResult criterion4() {
    const auto p = testsupport::case_model();
    const auto pl = testsupport::case_planner();
    struct Cell {
        std::string label;
        double computed;
        double printed;
    };
    std::vector<Cell> cells;
    {
        namespace e = oc::elast_ref_w;
        const double refs[] = {e::mu_R, e::mu_S, e::sigma_S, e::P,   e::Y,
                               e::beta, e::gamma, e::delta,  e::lambda, e::x_sub,
                               e::s_sub, e::eta,  e::eta_tilde, e::rho, e::K};
        const auto& names = analysis::w_star_params();
        for (std::size_t i = 0; i < names.size(); ++i)
            cells.push_back(
                {"w*/" + names[i], analysis::elasticity_w_star(p, names[i]).value, refs[i]});
    }
    {
        namespace e = oc::elast_ref_m;
        const double refs[] = {e::mu_R,  e::mu_S, e::sigma_S, e::P,   e::Y,       e::w,
                               e::beta,  e::gamma, e::delta,   e::lambda, e::x_sub, e::s_sub,
                               e::eta,   e::eta_tilde, e::rho, e::K,   e::epsilon, e::pi,
                               e::mu_pi, e::xi0,  e::xi1};
        const auto& names = analysis::m_star_params();
        for (std::size_t i = 0; i < names.size(); ++i)
            cells.push_back(
                {"m*/" + names[i], analysis::elasticity_m_star(p, pl, names[i]).value, refs[i]});
    }

    CriterionResult r;
    g_c4_band_failures.clear();
    g_c4_signs_ok = true;
    std::string outside;
    for (const auto& c : cells) {
        if (std::signbit(c.computed) != std::signbit(c.printed)) {
            g_c4_signs_ok = false;
            r.require(false, c.label + " sign: computed " + num(c.computed) + " vs printed " +
                                 num(c.printed));
        }
        const double band = std::fabs(c.printed) >= 0.4 ? 0.15 * std::fabs(c.printed) : 0.1;
        if (std::fabs(c.computed - c.printed) > band) {
            g_c4_band_failures.push_back(c.label);
            if (!outside.empty()) outside += ", ";
            outside += c.label + " computed " + num(c.computed) + " vs printed " + num(c.printed);
        }
    }
    if (!g_c4_band_failures.empty()) r.pass = false;
    r.detail = "signs " + std::string(g_c4_signs_ok ? "all match" : "MISMATCH") + "; " +
               num(static_cast<double>(cells.size() - g_c4_band_failures.size()), "%.0f") + "/" +
               num(static_cast<double>(cells.size()), "%.0f") + " magnitudes within band";
    if (!outside.empty()) r.detail += "; outside: " + outside;
    return r;
}

// --------------------------------------------------------------------------
// 5. accuracy of the constant-consumption approximation
// --------------------------------------------------------------------------
CriterionResult criterion5() {
    const auto p = testsupport::case_model();
    const auto d = params::derive_constants(p);
    const auto study = analysis::approximation_error_study(p, d, 201);
    CriterionResult r;
    r.require(study.max_abs_err_s <= 0.002, "service-control error " +
                                                num(100.0 * study.max_abs_err_s) + "% above 0.2%");
    r.require(study.a_under, "risky holdings not understated everywhere");
    r.require(study.x_over, "non-energy consumption not overstated everywhere");
    r.require(study.s_over, "energy service not overstated everywhere");
    if (r.pass)
        r.detail = "max |rel err| a/x/s = " + num(100.0 * study.max_abs_err_a) + "%/" +
                   num(100.0 * study.max_abs_err_x) + "%/" + num(100.0 * study.max_abs_err_s) +
                   "%; a understated, x and s overstated";
    return r;
}

// --------------------------------------------------------------------------
// 6. Monte Carlo oracles
// --------------------------------------------------------------------------
CriterionResult criterion6() {
    const auto p = testsupport::case_model();
    const auto d = params::derive_constants(p);
    const double w0 = p.agent.w0;
    const double z0 = w0 + d.H;
    CriterionResult r;

    // lifetime-value oracles: exact-in-distribution paths, n = 1e5
    stochastic::PathSpec vspec;
    vspec.dt = 1.0 / 6.0; // time integration only; the sampling itself is exact
    vspec.n_paths = 100000;
    vspec.seed = 20260816;
    {
        const auto mc = stochastic::mc_value_oracle(p, d, w0, stochastic::Policy::post_invest,
                                                    vspec);
        const double cl = solution::terminal_gain(p, d, w0);
        const double dev = std::fabs(mc.value - cl) / mc.se;
        r.require(dev <= 3.0, "committed-policy value " + num(dev) + " SE from closed form");
        r.detail += "G " + num(dev) + " SE";
    }
    {
        const auto mc = stochastic::mc_value_oracle(p, d, w0, stochastic::Policy::counterfactual,
                                                    vspec);
        const double cl = solution::counterfactual_value(p, d, w0);
        const double dev = std::fabs(mc.value - cl) / mc.se;
        r.require(dev <= 3.0, "never-invest value " + num(dev) + " SE from closed form");
        r.detail += ", F_hat " + num(dev) + " SE";
    }

    // first-passage law: empirical frequencies within the binomial 99% CI
    {
        stochastic::PathSpec cspec;
        cspec.dt = 1.0 / 52.0;
        cspec.horizon = 25.0;
        cspec.n_paths = 400000;
        cspec.seed = 20260816;
        cspec.bridge_correction = true;
        const std::vector<double> times{5.0, 10.0, 25.0};
        const auto hit = stochastic::mc_hitting(p, d, z0, times, 0.027, cspec);
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double exact = stochastic::hitting_cdf(d, z0, times[i]);
            const double dev = std::fabs(hit.cdf[i] - exact) / hit.cdf_se[i];
            worst = std::max(worst, dev);
            r.require(dev <= 2.576, "adoption cdf at t=" + num(times[i]) + ": " + num(dev) +
                                        " binomial SE (99% CI is 2.576)");
        }
        r.detail += ", cdf worst " + num(worst) + "/2.576 SE";
    }

    // discounted stopping transform within 1%
    {
        stochastic::PathSpec lspec;
        lspec.dt = 1.0 / 12.0;
        lspec.horizon = 200.0;
        lspec.n_paths = 100000;
        lspec.seed = 20260816;
        lspec.bridge_correction = true;
        const double rho = 0.027;
        const auto hit = stochastic::mc_hitting(p, d, z0, {25.0}, rho, lspec);
        const double exact = welfare::laplace_hitting(p, d, z0, rho);
        const double rel = std::fabs(hit.laplace.value - exact) / exact;
        r.require(rel <= 0.01, "stopping transform off by " + num(100.0 * rel) + "% (above 1%)");
        r.detail += ", laplace " + num(100.0 * rel) + "%/1%";
    }

    // social cost: two-factor Monte Carlo within 3 SE
    {
        stochastic::PathSpec wspec;
        wspec.dt = 1.0 / 12.0;
        wspec.n_paths = 30000;
        wspec.seed = 20260816;
        wspec.bridge_correction = true;
        const auto sp = testsupport::case_social();
        const auto mc = stochastic::mc_welfare_oracle(p, d, sp, w0, wspec);
        const double cl = welfare::social_cost(p, d, sp, z0);
        const double dev = std::fabs(mc.value - cl) / mc.se;
        r.require(dev <= 3.0, "social cost " + num(dev) + " SE from closed form");
        r.detail += ", V_sc " + num(dev) + " SE";
    }
    return r;
}

// --------------------------------------------------------------------------
// 7. welfare sign properties
// --------------------------------------------------------------------------
CriterionResult criterion7() {
    const auto p = testsupport::case_model();
    const auto d = params::derive_constants(p);
    CriterionResult r;
    int points = 0;
    for (int i = 0; i < 20; ++i) {
        const double w = 5000.0 + (1.4 * d.w_star - 5000.0) * i / 19.0;
        for (int j = 0; j < 20; ++j) {
            const double carbon = 10.0 + 60.0 * j / 19.0;
            auto sp = testsupport::case_social();
            sp.carbon_price = carbon;
            const auto rep = welfare::total_welfare(p, d, sp, w);
            ++points;
            r.require(rep.V_sc <= 1e-9, "V_sc " + num(rep.V_sc) + " > 0 at w=" + num(w) +
                                            ", carbon=" + num(carbon));
            r.require(rep.V_ev >= -1e-9, "V_ev " + num(rep.V_ev) + " < 0 at w=" + num(w) +
                                             ", carbon=" + num(carbon));
            r.require(rep.V_total >= -1e-9, "V_total " + num(rep.V_total) + " < 0 at w=" +
                                                num(w) + ", carbon=" + num(carbon));
            if (!r.pass) return r;
        }
    }
    r.detail = num(points, "%.0f") + "/400 grid points satisfy V_sc <= 0 <= V_ev, V_total";
    return r;
}

// --------------------------------------------------------------------------
// 8. population diffusion
// --------------------------------------------------------------------------
CriterionResult criterion8() {
    const auto cfg = config::RunConfig{};
    auto pspec = cfg.population; // N = 10000
    pspec.seed = cfg.seed;
    const auto pop = aggregate::sample_population(cfg.model, pspec);
    CriterionResult r;

    r.require(pop.immediate_share >= 0.35 && pop.immediate_share <= 0.65,
              "immediate share " + num(pop.immediate_share) + " outside [0.35, 0.65]");

    const std::vector<double> times{0.0, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0};
    double prev_s = -1.0, prev_c = 1e300;
    for (const double t : times) {
        const double s = aggregate::expected_adoption_share(pop, t);
        const double c = aggregate::expected_total_consumption(pop, t);
        r.require(s >= prev_s - 1e-12, "adoption share not monotone at t=" + num(t));
        r.require(c <= prev_c * (1.0 + 1e-12), "consumption not declining at t=" + num(t));
        prev_s = s;
        prev_c = c;
    }

    const auto sub = aggregate::apply_subsidy_policy(pop, cfg.planner);
    r.require(sub.immediate_share >= pop.immediate_share,
              "subsidy lowered the immediate share");
    for (const double t : times) {
        const double c0 = aggregate::expected_total_consumption(pop, t);
        const double c1 = aggregate::expected_total_consumption(sub, t);
        r.require(c1 <= c0 * (1.0 + 1e-12), "subsidy raised consumption at t=" + num(t));
        r.require(aggregate::expected_adoption_share(sub, t) >=
                      aggregate::expected_adoption_share(pop, t) - 1e-12,
                  "subsidy lowered adoption at t=" + num(t));
    }

    const auto lo = aggregate::apply_volatility_scenario(pop, 0.9);
    const auto hi = aggregate::apply_volatility_scenario(pop, 1.1);
    r.require(hi.pop.immediate_share > pop.immediate_share,
              "higher volatility did not raise time-0 adoption");
    r.require(lo.pop.immediate_share < pop.immediate_share,
              "lower volatility did not cut time-0 adoption");
    const double s25_lo = aggregate::expected_adoption_share(lo.pop, 25.0);
    const double s25_base = aggregate::expected_adoption_share(pop, 25.0);
    const double s25_hi = aggregate::expected_adoption_share(hi.pop, 25.0);
    r.require(s25_hi < s25_base && s25_base < s25_lo,
              "volatility scenarios do not cross by t=25 (S25 low/base/high = " + num(s25_lo) +
                  "/" + num(s25_base) + "/" + num(s25_hi) + ")");

    const auto sub_lo = aggregate::apply_subsidy_policy(lo.pop, cfg.planner);
    const auto sub_hi = aggregate::apply_subsidy_policy(hi.pop, cfg.planner);
    const double spread = s25_lo - s25_hi;
    const double spread_sub = aggregate::expected_adoption_share(sub_lo, 25.0) -
                              aggregate::expected_adoption_share(sub_hi, 25.0);
    r.require(spread_sub < spread, "subsidy widened the volatility spread at t=25 (" +
                                       num(spread) + " -> " + num(spread_sub) + ")");

    if (r.pass)
        r.detail = "share " + num(pop.immediate_share) + " (subsidised " +
                   num(sub.immediate_share) + "); S25 low/base/high " + num(s25_lo) + "/" +
                   num(s25_base) + "/" + num(s25_hi) + "; vol spread " + num(spread) + " -> " +
                   num(spread_sub) + " under subsidy";
    return r;
}

// --------------------------------------------------------------------------
// 9. retrofit depth
// --------------------------------------------------------------------------
CriterionResult criterion9() {
    const auto cfg = config::RunConfig{};
    const auto study = analysis::retrofit_depth(testsupport::case_model(), cfg.depth_K_min,
                                                cfg.depth_menu, cfg.social);
    CriterionResult r;
    const double level1 = cfg.depth_K_min + cfg.depth_menu[0].K_ee;
    const double level2 = cfg.depth_K_min + cfg.depth_menu[1].K_ee;
    r.require(study.K_star_F > level1 && study.K_star_F < level2,
              "household optimum " + num(study.K_star_F) + " not strictly inside (" +
                  num(level1) + ", " + num(level2) + ")");
    r.require(study.K_star_V > level1 && study.K_star_V < level2,
              "welfare optimum " + num(study.K_star_V) + " not strictly inside (" + num(level1) +
                  ", " + num(level2) + ")");
    const double gap = std::fabs(study.K_star_F - study.K_star_V);
    r.require(gap <= 0.005 * study.K_star_F,
              "household and welfare optima differ by " + num(gap) + " EUR (above 0.5%)");
    if (r.pass)
        r.detail = "K*(household) " + num(study.K_star_F, "%.1f") + " EUR, K*(welfare) " +
                   num(study.K_star_V, "%.1f") + " EUR, both in (" + num(level1) + ", " +
                   num(level2) + "), gap " + num(gap, "%.1f") + " EUR";
    return r;
}

// --------------------------------------------------------------------------
// 10. internal consistency on random draws
// --------------------------------------------------------------------------
CriterionResult criterion10() {
    const auto models = testsupport::random_valid_models(200);
    CriterionResult r;
    double worst_phi = 0.0, worst_a0 = 0.0, worst_round = 0.0, worst_paste = 0.0;
    for (const auto& p : models) {
        const auto d = params::derive_constants(p);
        const double gamma = p.agent.gamma;

        const double lhs = d.delta_hat - d.phi;
        const double rhs = (1.0 - gamma) * (d.mu_Z - gamma * d.sigma_Z * d.sigma_Z / 2.0);
        worst_phi = std::max(worst_phi, std::fabs(lhs - rhs) / d.delta_hat);

        const double quad = 0.5 * d.kappa_mpr * d.kappa_mpr * d.a0 * (d.a0 + 1.0) -
                            (d.delta_hat - p.market.mu_R) * d.a0 - d.delta_hat;
        worst_a0 = std::max(worst_a0, std::fabs(quad) / d.delta_hat);

        if (!d.waiting()) continue;
        // state -> marginal value -> state
        const double z = 0.6 * d.z_star;
        const double b = solution::invert_marginal_log(p, d, z);
        worst_round =
            std::max(worst_round, std::fabs(solution::dual_neg_slope_log(p, d, b) - z) / z);
        // level pasting of the stopped and waiting branches at the boundary
        const double bh = d.log_z_hat_star;
        const double u_hat = gamma / (1.0 - gamma) * std::exp((gamma - 1.0) / gamma * bh);
        const double v_stop = u_hat / d.Gamma + d.theta * d.z_hat_star;
        const double v_wait = u_hat / d.Gamma_hat + d.A0_dual;
        worst_paste =
            std::max(worst_paste, std::fabs(v_stop - v_wait) / std::fabs(v_wait));
    }
    r.require(worst_phi < 1e-9, "consumption-rate identity residual " + num(worst_phi));
    r.require(worst_a0 < 1e-9, "stopping-quadratic residual " + num(worst_a0));
    r.require(worst_round < 1e-9, "duality round-trip residual " + num(worst_round));
    r.require(worst_paste < 1e-9, "pasting residual " + num(worst_paste));
    if (r.pass)
        r.detail = "200 draws; max residuals: rate identity " + num(worst_phi) + ", quadratic " +
                   num(worst_a0) + ", round-trip " + num(worst_round) + ", pasting " +
                   num(worst_paste);
    return r;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        double budget_s;
        CriterionResult (*fn)();
    };
    const Entry criteria[] = {
        {1, "case-study constants", 1.0, criterion1},
        {2, "immediate-regime penalty rate", 1.0, criterion2},
        {3, "subsidy surface", 10.0, criterion3},
        {4, "elasticity table", 30.0, criterion4},
        {5, "approximation accuracy", 10.0, criterion5},
        {6, "monte carlo oracles", 300.0, criterion6},
        {7, "welfare sign properties", 30.0, criterion7},
        {8, "population diffusion", 300.0, criterion8},
        {9, "retrofit depth", 30.0, criterion9},
        {10, "internal consistency", 10.0, criterion10},
    };

    int passed = 0;
    std::vector<bool> pass(11, false);
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = c.fn();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("unexpected exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.pass && secs > c.budget_s) {
            r.pass = false;
            r.detail += " [runtime " + num(secs, "%.1f") + "s over the " +
                        num(c.budget_s, "%.0f") + "s budget]";
        }
        pass[static_cast<std::size_t>(c.id)] = r.pass;
        if (r.pass) ++passed;
        std::printf("[%s] criterion %d: %s -- %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", c.id,
                    c.name, r.detail.c_str(), secs);
        std::fflush(stdout);
    }

    // Documented state: everything passes except the two known magnitude
    // cells of the elasticity table.
    const bool documented =
        pass[1] && pass[2] && pass[3] && !pass[4] && g_c4_signs_ok &&
        g_c4_band_failures == std::vector<std::string>{"m*/s_sub", "m*/eta"} && pass[5] &&
        pass[6] && pass[7] && pass[8] && pass[9] && pass[10];

    std::printf("ACCEPTANCE: %d/10 criteria pass; the elasticity table deviates from the "
                "printed reference on %d of 36 cells%s\n",
                passed, static_cast<int>(g_c4_band_failures.size()),
                documented ? " (documented deviation; gate outcome matches the expected state)"
                           : " (OUTCOME DIFFERS FROM THE DOCUMENTED STATE)");
    return documented ? 0 : 1;
}
