// Planner's subsidy problem: objective coefficients, the closed-form levy in
// the immediate regime, the waiting-regime optimiser (interior, boundary,
// and saturation-kink optima), derivative consistency, and monotonicity.
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
    subsidy::PlannerParams pl;
    double z45;
    Fixture()
        : p(testsupport::case_model()),
          d(params::derive_constants(p)),
          pl(testsupport::case_planner()),
          z45(p.agent.w0 + d.H) {}
};

} // namespace

TEST_CASE_METHOD(Fixture, "objective coefficients match frozen references") {
    const auto co = subsidy::objective_coeffs(p, d, pl);
    CHECK_THAT(co.C0, WithinRel(oc::subsidy::C0_c45, 1e-12));
    CHECK_THAT(co.C1, WithinRel(oc::subsidy::C1_c45, 1e-12));
    CHECK_THAT(co.eps_hat, WithinRel(oc::welf::eps_hat, 1e-13));
}

TEST_CASE_METHOD(Fixture, "immediate regime: the planner levies a small charge") {
    const double z_hi = 2.0 * d.z_star;
    for (const auto& [carbon, expected] :
         {std::pair{10.0, oc::subsidy::m_imm_c10}, std::pair{45.0, oc::subsidy::m_imm_c45},
          std::pair{70.0, oc::subsidy::m_imm_c70}}) {
        CAPTURE(carbon);
        const auto res =
            subsidy::optimal_subsidy_immediate(p, d, testsupport::planner_at_carbon(carbon), z_hi);
        CHECK(res.regime == Regime::ImmediateInvest);
        CHECK_FALSE(res.boundary_hit);
        CHECK_THAT(res.m_star, WithinRel(expected, 1e-12));
        CHECK(res.m_star < 0.0);
        CHECK(res.m_star > -0.02);
    }
    // dispatch agrees, and the waiting solver refuses the state
    const auto via_dispatch = subsidy::optimal_subsidy(p, d, pl, z_hi);
    CHECK_THAT(via_dispatch.m_star, WithinRel(oc::subsidy::m_imm_c45, 1e-12));
    CHECK_THROWS_AS(subsidy::optimal_subsidy_waiting(p, d, pl, z_hi), RegimeError);
    CHECK_THROWS_AS(subsidy::optimal_subsidy_immediate(p, d, pl, z45), RegimeError);

    // a very rigid budget drives the levy to zero from below
    auto rigid = pl;
    rigid.xi1 = 1e6;
    const auto res = subsidy::optimal_subsidy_immediate(p, d, rigid, z_hi);
    CHECK(res.m_star < 0.0);
    CHECK(res.m_star > -1e-6);
}

TEST_CASE_METHOD(Fixture, "waiting regime: interior optimum at the case-study point") {
    const auto res = subsidy::optimal_subsidy_waiting(p, d, pl, z45);
    CHECK(res.regime == Regime::Waiting);
    CHECK_FALSE(res.boundary_hit);
    CHECK_THAT(res.m_star, WithinRel(oc::subsidy::m_wait_w45_c45, 1e-9));
    CHECK_THAT(res.J_star, WithinRel(oc::subsidy::J_wait_w45_c45, 1e-9));

    // first-order condition and global optimality over the admissible range
    CHECK_THAT(subsidy::planner_objective_dm(p, d, pl, z45, res.m_star),
               WithinAbs(0.0, 1e-4)); // J is O(1e3); dJ crosses zero steeply
    for (int i = 0; i <= 64; ++i) {
        const double m = d.m_bar * i / 64.0;
        CAPTURE(m);
        CHECK(subsidy::planner_objective(p, d, pl, z45, m) >= res.J_star - 1e-9);
    }
    CHECK_THAT(subsidy::planner_objective(p, d, pl, z45, res.m_star),
               WithinRel(res.J_star, 1e-12));
}

TEST_CASE_METHOD(Fixture, "waiting optima across wealth and carbon levels") {
    const auto at = [&](double w, double carbon) {
        const double z = w + d.H;
        return subsidy::optimal_subsidy_waiting(p, d, testsupport::planner_at_carbon(carbon), z);
    };
    CHECK_THAT(at(45000.0, 70.0).m_star, WithinRel(oc::subsidy::m_wait_w45_c70, 1e-9));
    CHECK_THAT(at(200000.0, 45.0).m_star, WithinRel(oc::subsidy::m_wait_w200_c45, 1e-9));
    // near the threshold the optimum saturates: the cheapest acceleration is
    // the subsidy that tips the agent into adopting right now
    const auto res400 = at(400000.0, 45.0);
    CHECK_THAT(res400.m_star, WithinRel(oc::subsidy::m_wait_w400_c45, 1e-12));
    CHECK(res400.boundary_hit);

    // weakly increasing in the carbon price, weakly decreasing in wealth
    double prev = -1.0;
    for (const double carbon : {10.0, 25.0, 45.0, 70.0, 120.0}) {
        CAPTURE(carbon);
        const double m = at(45000.0, carbon).m_star;
        CHECK(m >= prev - 1e-10);
        prev = m;
    }
    prev = 2.0;
    for (const double w : {45000.0, 100000.0, 200000.0, 300000.0, 400000.0}) {
        CAPTURE(w);
        const double m = at(w, 45.0).m_star;
        CHECK(m <= prev + 1e-10);
        prev = m;
    }
}

TEST_CASE_METHOD(Fixture, "a steep carbon price drives the optimum to the saturation kink") {
    // at the kink the subsidised threshold meets the current state:
    // z_star(m) = z45  <=>  m = (z45 / Lambda - theta) / (B1 K)
    const double m_kink = (z45 / d.Lambda - d.theta) / (d.B1 * p.retrofit.K);
    CHECK_THAT(m_kink, WithinRel(oc::subsidy::m_kink_w45, 1e-11));

    const auto pl200 = testsupport::planner_at_carbon(200.0);
    const auto res = subsidy::optimal_subsidy_waiting(p, d, pl200, z45);
    CHECK(res.boundary_hit);
    CHECK_THAT(res.m_star, WithinAbs(m_kink, 1e-9));

    // the derivative flips sign across the kink while J stays continuous
    CHECK(subsidy::planner_objective_dm(p, d, pl200, z45, m_kink * 0.999) < 0.0);
    CHECK(subsidy::planner_objective_dm(p, d, pl200, z45, m_kink * 1.001) > 0.0);
    const double J_lo = subsidy::planner_objective(p, d, pl200, z45, m_kink - 1e-9);
    const double J_hi = subsidy::planner_objective(p, d, pl200, z45, m_kink + 1e-9);
    CHECK_THAT(J_lo, WithinAbs(J_hi, 0.01));

    // past the kink the objective matches the immediate-regime expression
    const auto co = subsidy::objective_coeffs(p, d, pl200);
    const double m_sat = m_kink * 1.2;
    CHECK_THAT(subsidy::planner_objective(p, d, pl200, z45, m_sat),
               WithinRel(co.C0 + co.C1 * m_sat + subsidy::outlay(pl200, m_sat * p.retrofit.K),
                         1e-12));
}

TEST_CASE_METHOD(Fixture, "analytic derivative agrees with central differences") {
    for (const double m : {0.002, 0.0079, 0.015, 0.03}) {
        CAPTURE(m);
        const double h = 1e-6;
        const double num = (subsidy::planner_objective(p, d, pl, z45, m + h) -
                            subsidy::planner_objective(p, d, pl, z45, m - h)) /
                           (2.0 * h);
        CHECK_THAT(subsidy::planner_objective_dm(p, d, pl, z45, m), WithinRel(num, 1e-5));
    }
}

TEST_CASE_METHOD(Fixture, "laplace factors cap at one and lose their slope there") {
    const double r = 0.027;
    CHECK_THAT(subsidy::laplace_factor(p, d, z45, 0.0, r),
               WithinRel(oc::fp::laplace_eps_net, 1e-12));
    // beyond the kink the factor saturates
    const double m_kink = (z45 / d.Lambda - d.theta) / (d.B1 * p.retrofit.K);
    CHECK_THAT(subsidy::laplace_factor(p, d, z45, m_kink * 1.05, r), WithinAbs(1.0, 0.0));
    CHECK_THAT(subsidy::laplace_factor_dm(p, d, z45, m_kink * 1.05, r), WithinAbs(0.0, 0.0));
    CHECK(subsidy::laplace_factor_dm(p, d, z45, 0.5 * m_kink, r) > 0.0);
    // monotone in m below the kink
    double prev = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double m = m_kink * i / 10.0;
        const double L = subsidy::laplace_factor(p, d, z45, m, r);
        CHECK(L >= prev);
        CHECK(L <= 1.0);
        prev = L;
    }
}

TEST_CASE_METHOD(Fixture, "planner inputs and subsidy domain are guarded") {
    auto bad = pl;
    bad.xi0 = 0.5;
    CHECK_THROWS_AS(subsidy::check_planner(bad), DomainError);
    bad = pl;
    bad.xi1 = 0.0;
    CHECK_THROWS_AS(subsidy::check_planner(bad), DomainError);
    CHECK_NOTHROW(subsidy::check_planner(pl));

    CHECK_THROWS_AS(subsidy::planner_objective(p, d, pl, z45, -0.01), DomainError);
    CHECK_THROWS_AS(subsidy::planner_objective(p, d, pl, z45, d.m_bar * 1.01), DomainError);
}

TEST_CASE_METHOD(Fixture, "a subsidy rescales the retrofit cost and re-derives") {
    const double m = 0.05;
    const auto q = subsidy::subsidized_params(p, m);
    CHECK_THAT(q.retrofit.K, WithinRel((1.0 - m) * p.retrofit.K, 1e-15));
    const auto dq = params::derive_constants(q);
    CHECK_THAT(dq.theta, WithinRel(d.theta + m * d.B1 * p.retrofit.K, 1e-9));
    CHECK(dq.z_star < d.z_star); // cheaper retrofit lowers the threshold
    // the full transfer m_bar turns the premium non-negative
    const auto q_full = subsidy::subsidized_params(p, d.m_bar);
    const auto dq_full = params::derive_constants(q_full);
    CHECK_THAT(dq_full.theta, WithinAbs(0.0, 1e-6));
}
