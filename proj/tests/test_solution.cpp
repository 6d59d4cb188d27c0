// Household value function and controls: frozen references at the
// case-study point, duality round trips, pasting at the threshold, the
// control jump, and domain guards.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <retrofit/config.hpp>

#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace retrofit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace oc = retrofit::oracle;

namespace {

struct Fixture {
    params::ModelParams p;
    params::DerivedConstants d;
    Fixture() : p(testsupport::case_model()), d(params::derive_constants(p)) {}
};

} // namespace

TEST_CASE_METHOD(Fixture, "waiting-region value and controls at the case-study point") {
    const double w = 45000.0;
    const auto vp = solution::value_point(p, d, w);
    CHECK(vp.regime == Regime::Waiting);
    CHECK_THAT(vp.F, WithinRel(oc::sol::F_w45k, 1e-9));
    CHECK_THAT(vp.dF, WithinRel(oc::sol::zh_w45k, 1e-9));
    CHECK(vp.d2F < 0.0);
    CHECK_THAT(solution::primal_value(p, d, w), WithinRel(vp.F, 1e-13));

    const auto ct = solution::optimal_controls(p, d, w, vp.regime);
    CHECK_THAT(ct.x, WithinRel(oc::sol::x_w45k, 1e-9));
    CHECK_THAT(ct.s, WithinRel(oc::sol::s_w45k, 1e-9));
    CHECK_THAT(ct.a * w, WithinRel(oc::sol::hold_w45k, 1e-9));
    CHECK_THAT(ct.c, WithinRel(oc::sol::s_w45k / p.retrofit.eta, 1e-9));
    // total excess expenditure at the shadow prices
    const double excess = (ct.x - p.agent.x_sub) + (ct.s - p.agent.s_sub) * d.price_existing;
    CHECK_THAT(excess, WithinRel(oc::sol::e_w45k, 1e-9));
    CHECK(ct.x > p.agent.x_sub);
    CHECK(ct.s > p.agent.s_sub);

    // the three value levels are ordered: option > counterfactual > invest-now
    const double Fhat = solution::counterfactual_value(p, d, w);
    const double G = solution::terminal_gain(p, d, w);
    CHECK_THAT(Fhat, WithinRel(oc::sol::Fhat_w45k, 1e-12));
    CHECK_THAT(G, WithinRel(oc::sol::G_w45k, 1e-12));
    CHECK(vp.F > Fhat);
    CHECK(Fhat > G);
}

TEST_CASE_METHOD(Fixture, "immediate-region value and controls at half a million") {
    const double w = 500000.0;
    REQUIRE(w > d.w_star);
    const auto vp = solution::value_point(p, d, w);
    CHECK(vp.regime == Regime::ImmediateInvest);
    CHECK_THAT(vp.F, WithinRel(oc::sol::F_w500k, 1e-12));
    CHECK_THAT(vp.F, WithinRel(solution::terminal_gain(p, d, w), 1e-13));

    const auto ct = solution::optimal_controls(p, d, w, vp.regime);
    CHECK_THAT(ct.x, WithinRel(oc::sol::x_w500k, 1e-12));
    CHECK_THAT(ct.s, WithinRel(oc::sol::s_w500k, 1e-12));
    CHECK_THAT(ct.a * w, WithinRel(oc::sol::hold_w500k, 1e-12));
    CHECK_THAT(ct.c, WithinRel(oc::sol::s_w500k / p.retrofit.eta_tilde, 1e-12));
}

TEST_CASE_METHOD(Fixture, "legendre round trip between state and marginal value") {
    for (const double frac : {0.05, 0.3, 0.7, 0.999}) {
        CAPTURE(frac);
        const double z = frac * d.z_star;
        const double b = solution::invert_marginal_log(p, d, z);
        CHECK_THAT(solution::dual_neg_slope_log(p, d, b), WithinRel(z, 1e-10));
        CHECK(solution::dual_second_log(p, d, b) > 0.0);
    }
    // the boundary maps to the dual free boundary
    CHECK_THAT(solution::invert_marginal_log(p, d, d.z_star),
               WithinRel(d.log_z_hat_star, 1e-10));
}

TEST_CASE_METHOD(Fixture, "value pastes smoothly at the investment threshold") {
    const double w = d.w_star;
    const double eps = 1e-7 * w;
    const auto below = solution::value_point(p, d, w - eps);
    const auto at = solution::value_point(p, d, w);
    const auto above = solution::value_point(p, d, w + eps);
    CHECK(below.regime == Regime::Waiting);
    CHECK(at.regime == Regime::ImmediateInvest);
    CHECK(above.regime == Regime::ImmediateInvest);
    // value matching: just inside the waiting region the continuation value
    // agrees with the stop-now value at the same wealth to second order
    CHECK_THAT(below.F, WithinRel(solution::terminal_gain(p, d, w - eps), 1e-12));
    CHECK_THAT(at.F, WithinRel(solution::terminal_gain(p, d, w), 1e-12));
    // slope matching across the boundary
    CHECK_THAT(below.dF, WithinRel(at.dF, 1e-6));
    CHECK_THAT(above.dF, WithinRel(at.dF, 1e-6));
}

TEST_CASE_METHOD(Fixture, "controls jump at the threshold") {
    const double w = d.w_star;
    const auto minus = solution::optimal_controls(p, d, w, Regime::Waiting);
    const auto plus = solution::optimal_controls(p, d, w, Regime::ImmediateInvest);
    CHECK_THAT(minus.x, WithinRel(oc::sol::x_jump_minus, 1e-9));
    CHECK_THAT(plus.x, WithinRel(oc::sol::x_jump_plus, 1e-9));
    CHECK_THAT(minus.s, WithinRel(oc::sol::s_jump_minus, 1e-9));
    CHECK_THAT(plus.s, WithinRel(oc::sol::s_jump_plus, 1e-9));
    CHECK_THAT(minus.a * w, WithinRel(oc::sol::hold_jump_minus, 1e-9));
    CHECK_THAT(plus.a * w, WithinRel(oc::sol::hold_jump_plus, 1e-9));

    // directions: consumption down, service up, risky holdings down
    CHECK(plus.x < minus.x);
    CHECK(plus.s > minus.s);
    CHECK(plus.a < minus.a);
    // the excess-service ratio equals the efficiency gain net of the price effect
    const double ratio = (plus.s - p.agent.s_sub) / (minus.s - p.agent.s_sub);
    const double ehat = d.Gamma_hat / d.Gamma;
    CHECK_THAT(ratio, WithinRel(p.retrofit.eta_tilde / p.retrofit.eta * ehat, 1e-9));
}

TEST_CASE_METHOD(Fixture, "counterfactual inverse recovers disposable capital") {
    for (const double w : {45000.0, 200000.0}) {
        CAPTURE(w);
        const double u = solution::counterfactual_value(p, d, w);
        CHECK_THAT(solution::counterfactual_inverse(d, u, p.agent.gamma),
                   WithinRel(w + d.H, 1e-12));
    }
    CHECK_THROWS_AS(solution::counterfactual_inverse(d, 0.0, p.agent.gamma), DomainError);
    CHECK_THROWS_AS(solution::counterfactual_inverse(d, 1.0, p.agent.gamma), DomainError);
}

TEST_CASE_METHOD(Fixture, "approximate policy equals the counterfactual on the waiting region") {
    const double w = 45000.0;
    const auto approx = solution::approx_controls(p, d, w);
    const auto cf = solution::counterfactual_controls(p, d, w);
    CHECK(approx.a == cf.a);
    CHECK(approx.x == cf.x);
    CHECK(approx.s == cf.s);
    CHECK_THAT(cf.x, WithinRel(oc::sol::cf_x_w45k, 1e-12));
    CHECK_THAT(cf.s, WithinRel(oc::sol::cf_s_w45k, 1e-12));
    CHECK_THAT(cf.a * w, WithinRel(oc::sol::cf_hold_w45k, 1e-12));

    // defined up to and including the boundary, nowhere else
    CHECK_NOTHROW(solution::approx_controls(p, d, d.w_star));
    CHECK_THROWS_AS(solution::approx_controls(p, d, d.w_star * 1.01), RegimeError);
    CHECK_THROWS_AS(solution::approx_controls(p, d, -d.H - 1.0), RegimeError);
    const auto ps = testsupport::synthetic_model();
    const auto ds = params::derive_constants(ps);
    CHECK_THROWS_AS(solution::approx_controls(ps, ds, 45000.0), RegimeError);
}

TEST_CASE_METHOD(Fixture, "domain guards reject states outside the model") {
    CHECK_THROWS_AS(solution::value_point(p, d, -d.H_tilde), DomainError);
    CHECK_THROWS_AS(solution::invert_marginal_log(p, d, 0.0), DomainError);
    CHECK_THROWS_AS(solution::invert_marginal_log(p, d, d.z_star * 1.000001), DomainError);
    CHECK_THROWS_AS(solution::dual_value(p, d, 0.0), DomainError);
}

TEST_CASE("value ordering and duality hold on random waiting models") {
    const auto models = testsupport::random_valid_models(60);
    REQUIRE(models.size() == 60);
    std::size_t n_waiting = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        CAPTURE(i);
        const auto& p = models[i];
        const auto d = params::derive_constants(p);
        if (!d.waiting()) continue;
        ++n_waiting;
        for (const double frac : {0.25, 0.6, 0.95}) {
            CAPTURE(frac);
            const double z = frac * d.z_star;
            const double w = z - d.H;
            const auto vp = solution::value_point(p, d, w);
            CHECK(vp.F < 0.0);
            CHECK(vp.dF > 0.0);
            CHECK(vp.d2F < 0.0);
            const double Fhat = solution::counterfactual_value(p, d, w);
            const double G = solution::terminal_gain(p, d, w);
            CHECK(vp.F >= Fhat - 1e-12 * std::fabs(Fhat));
            CHECK(vp.F >= G - 1e-12 * std::fabs(G));
            // round trip state -> dual -> state
            const double b = solution::invert_marginal_log(p, d, z);
            CHECK_THAT(solution::dual_neg_slope_log(p, d, b), WithinRel(z, 1e-9));
            // controls are interior
            const auto ct = solution::waiting_controls(p, d, w);
            CHECK(ct.x > p.agent.x_sub);
            CHECK(ct.s > p.agent.s_sub);
        }
    }
    CHECK(n_waiting >= 10);
}
