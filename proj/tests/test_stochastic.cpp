// Monte Carlo engines: exact GBM moments, determinism, the first-passage
// oracle with and without the Brownian-bridge correction, and the value and
// social-cost oracles against their closed forms.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

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

TEST_CASE("gbm paths reproduce the exact lognormal law and are deterministic") {
    const double z0 = 100.0, mu = 0.04, sigma = 0.3;
    stochastic::PathSpec spec;
    spec.horizon = 1.0;
    spec.dt = 1.0 / 12.0;
    spec.seed = 7;

    const std::size_t n = 5000;
    std::vector<double> terminal_log(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto path = stochastic::simulate_gbm(z0, mu, sigma, spec, i);
        REQUIRE(path.size() == 13);
        REQUIRE(path.front() == z0);
        terminal_log[i] = std::log(path.back());
    }
    const double mean = std::accumulate(terminal_log.begin(), terminal_log.end(), 0.0) /
                        static_cast<double>(n);
    double var = 0.0;
    for (const double x : terminal_log) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);

    const double exact_mean = std::log(z0) + mu - 0.5 * sigma * sigma;
    const double se_mean = sigma / std::sqrt(static_cast<double>(n));
    CHECK_THAT(mean, WithinAbs(exact_mean, 3.5 * se_mean));
    const double se_var = sigma * sigma * std::sqrt(2.0 / static_cast<double>(n));
    CHECK_THAT(var, WithinAbs(sigma * sigma, 3.5 * se_var));

    // identical path index => identical path; different index => different path
    const auto a = stochastic::simulate_gbm(z0, mu, sigma, spec, 7);
    const auto b = stochastic::simulate_gbm(z0, mu, sigma, spec, 7);
    const auto c = stochastic::simulate_gbm(z0, mu, sigma, spec, 8);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE_METHOD(Fixture, "analytic first-passage law matches frozen references") {
    const double z0 = p.agent.w0 + d.H;
    CHECK_THAT(stochastic::hitting_cdf(d, z0, 5.0), WithinRel(oc::fp::cdf_t5, 1e-12));
    CHECK_THAT(stochastic::hitting_cdf(d, z0, 10.0), WithinRel(oc::fp::cdf_t10, 1e-12));
    CHECK_THAT(stochastic::hitting_cdf(d, z0, 25.0), WithinRel(oc::fp::cdf_t25, 1e-12));
    CHECK_THAT(stochastic::hitting_pdf(d, z0, 5.0), WithinRel(oc::fp::pdf_t5, 1e-12));
    CHECK_THAT(stochastic::hitting_pdf(d, z0, 10.0), WithinRel(oc::fp::pdf_t10, 1e-12));
    CHECK_THAT(stochastic::hitting_pdf(d, z0, 25.0), WithinRel(oc::fp::pdf_t25, 1e-12));
    CHECK_THAT(hitting::laplace(z0, d.z_star, d.mu_Z, d.sigma_Z, 0.027),
               WithinRel(oc::fp::laplace_eps_net, 1e-12));
    CHECK_THAT(hitting::growth_integral(z0, d.z_star, d.mu_Z, d.sigma_Z, d.mu_Z, 5.0),
               WithinRel(oc::fp::growth_t5, 1e-7));
    CHECK_THAT(hitting::growth_integral(z0, d.z_star, d.mu_Z, d.sigma_Z, d.mu_Z, 10.0),
               WithinRel(oc::fp::growth_t10, 1e-7));
    CHECK_THAT(hitting::growth_integral(z0, d.z_star, d.mu_Z, d.sigma_Z, d.mu_Z, 25.0),
               WithinRel(oc::fp::growth_t25, 1e-7));

    // log-drift of disposable capital is positive: the threshold is reached a.s.
    const double nu = (d.mu_Z - 0.5 * d.sigma_Z * d.sigma_Z) / d.sigma_Z;
    CHECK_THAT(nu, WithinRel(oc::fp::nu, 1e-11));
    const double b = std::log(d.z_star / z0) / d.sigma_Z;
    CHECK_THAT(b, WithinRel(oc::fp::b, 1e-11));

    // degenerate cases
    CHECK(hitting::cdf(d.z_star, d.z_star, d.mu_Z, d.sigma_Z, 1.0) == 1.0);
    CHECK(hitting::laplace(2.0 * d.z_star, d.z_star, d.mu_Z, d.sigma_Z, 0.04) == 1.0);
    CHECK_THROWS_AS(hitting::laplace_exponent(d.mu_Z, d.sigma_Z, 0.0), DomainError);
}

TEST_CASE_METHOD(Fixture, "grid-only crossings undershoot; the bridge removes the bias") {
    const double z0 = p.agent.w0 + d.H;
    stochastic::PathSpec spec;
    spec.n_paths = 40000;
    spec.seed = 31;
    const std::vector<double> times{10.0};
    const double exact = oc::fp::cdf_t10;

    spec.dt = 1.0 / 12.0;
    const auto coarse = stochastic::mc_hitting(p, d, z0, times, 0.027, spec);
    spec.dt = 1.0 / 48.0;
    const auto fine = stochastic::mc_hitting(p, d, z0, times, 0.027, spec);
    // both biased down, the coarse grid decisively so
    CHECK(coarse.cdf[0] < exact - coarse.cdf_se[0]);
    CHECK(fine.cdf[0] < exact + 2.0 * fine.cdf_se[0]);
    // refining the grid recovers mass
    CHECK(fine.cdf[0] > coarse.cdf[0] - 3.0 * (fine.cdf_se[0] + coarse.cdf_se[0]));

    spec.dt = 1.0 / 12.0;
    spec.bridge_correction = true;
    const auto bridged = stochastic::mc_hitting(p, d, z0, times, 0.027, spec);
    CHECK_THAT(bridged.cdf[0], WithinAbs(exact, 3.5 * bridged.cdf_se[0]));
}

TEST_CASE_METHOD(Fixture, "first-passage monte carlo matches cdf and laplace references") {
    const double z0 = p.agent.w0 + d.H;
    stochastic::PathSpec spec;
    spec.n_paths = 40000;
    spec.dt = 1.0 / 12.0;
    spec.horizon = 200.0;
    spec.seed = 57;
    spec.bridge_correction = true;
    const std::vector<double> times{5.0, 10.0, 25.0};
    const auto mc = stochastic::mc_hitting(p, d, z0, times, 0.027, spec);

    CHECK_THAT(mc.cdf[0], WithinAbs(oc::fp::cdf_t5, 3.5 * mc.cdf_se[0]));
    CHECK_THAT(mc.cdf[1], WithinAbs(oc::fp::cdf_t10, 3.5 * mc.cdf_se[1]));
    CHECK_THAT(mc.cdf[2], WithinAbs(oc::fp::cdf_t25, 3.5 * mc.cdf_se[2]));
    // laplace: allow the horizon-truncation mass on top of the noise band
    const double tail = 1.0 - stochastic::hitting_cdf(d, z0, spec.horizon);
    CHECK_THAT(mc.laplace.value,
               WithinAbs(oc::fp::laplace_eps_net,
                         3.5 * mc.laplace.se + tail * mc.laplace.truncation_bound +
                             0.005 * oc::fp::laplace_eps_net));
    CHECK(mc.laplace.n == spec.n_paths);

    // determinism
    const auto mc2 = stochastic::mc_hitting(p, d, z0, times, 0.027, spec);
    CHECK(mc.laplace.value == mc2.laplace.value);
    CHECK(mc.cdf == mc2.cdf);
}

TEST_CASE_METHOD(Fixture, "value oracle reproduces the closed forms of the fixed policies") {
    const double w = 45000.0;
    stochastic::PathSpec spec;
    spec.n_paths = 20000;
    spec.dt = 1.0 / 12.0;
    spec.seed = 101;

    const auto post = stochastic::mc_value_oracle(p, d, w, stochastic::Policy::post_invest, spec);
    const double G = solution::terminal_gain(p, d, w);
    CHECK_THAT(post.value, WithinAbs(G, 3.5 * post.se + 1e-4 * std::fabs(G)));

    const auto cf =
        stochastic::mc_value_oracle(p, d, w, stochastic::Policy::counterfactual, spec);
    const double Fhat = solution::counterfactual_value(p, d, w);
    CHECK_THAT(cf.value, WithinAbs(Fhat, 3.5 * cf.se + 1e-4 * std::fabs(Fhat)));

    // the switching approximation is feasible: sandwiched between the
    // counterfactual value and the optimum
    const auto approx =
        stochastic::mc_value_oracle(p, d, w, stochastic::Policy::approx_waiting, spec);
    const double F = solution::value_point(p, d, w).F;
    CHECK(approx.value <= F + 3.5 * approx.se + 1e-4 * std::fabs(F));
    CHECK(approx.value >= Fhat - 3.5 * approx.se - 1e-4 * std::fabs(Fhat));

    // determinism and antithetic pairing
    const auto cf2 =
        stochastic::mc_value_oracle(p, d, w, stochastic::Policy::counterfactual, spec);
    CHECK(cf.value == cf2.value);
    auto anti = spec;
    anti.antithetic = true;
    const auto cfa =
        stochastic::mc_value_oracle(p, d, w, stochastic::Policy::counterfactual, anti);
    CHECK(cfa.n == spec.n_paths / 2);
    CHECK_THAT(cfa.value, WithinAbs(Fhat, 3.5 * cfa.se + 1e-4 * std::fabs(Fhat)));
    CHECK(cfa.se < cf.se); // pairing cancels the leading odd term
}

TEST_CASE_METHOD(Fixture, "social-cost oracle agrees with the closed form") {
    const welfare::SocialParams sp = testsupport::case_social();
    const double w = 45000.0;
    stochastic::PathSpec spec;
    spec.n_paths = 20000;
    spec.dt = 1.0 / 12.0;
    spec.seed = 303;
    spec.bridge_correction = true;

    const auto mc = stochastic::mc_welfare_oracle(p, d, sp, w, spec);
    const double exact = welfare::social_cost(p, d, sp, w + d.H);
    CHECK_THAT(mc.value, WithinAbs(exact, 3.5 * mc.se + 0.005 * std::fabs(exact)));

    // immediate regime: no first-passage delay, the integral starts at once
    const auto mc_hi = stochastic::mc_welfare_oracle(p, d, sp, 600000.0, spec);
    const double exact_hi = welfare::social_cost_integral(p, d, sp);
    CHECK_THAT(mc_hi.value, WithinAbs(exact_hi, 3.5 * mc_hi.se + 0.005 * std::fabs(exact_hi)));

    const auto mc2 = stochastic::mc_welfare_oracle(p, d, sp, w, spec);
    CHECK(mc.value == mc2.value);
}

TEST_CASE_METHOD(Fixture, "trajectories switch regime once and carry the twin gap") {
    stochastic::PathSpec spec;
    spec.dt = 1.0 / 52.0;
    spec.seed = 11;

    // find a path that crosses within the default 25-year window
    bool found = false;
    for (std::uint64_t idx = 0; idx < 60 && !found; ++idx) {
        const auto tr = stochastic::simulate_trajectory(p, d, spec, idx);
        REQUIRE(tr.times.size() == tr.Z.size());
        if (!tr.hit) continue;
        found = true;
        CAPTURE(idx, tr.tau_hat);
        CHECK(tr.tau_hat > 0.0);
        bool post_seen = false;
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            CAPTURE(k);
            if (tr.regime[k] == Regime::PostInvest) post_seen = true;
            // one-way switch
            if (post_seen) REQUIRE(tr.regime[k] == Regime::PostInvest);
            if (tr.times[k] < tr.tau_hat) {
                REQUIRE(tr.regime[k] == Regime::Waiting);
                REQUIRE(tr.R[k] == 0.0);
                REQUIRE(tr.Q[k] == 0.0);
            }
            if (tr.regime[k] == Regime::PostInvest) {
                REQUIRE(tr.R[k] > 0.0); // service rises after the retrofit
                REQUIRE(tr.Q[k] < 0.0); // fuel falls (negative premium)
            }
            REQUIRE(tr.Z[k] > 0.0);
            REQUIRE(tr.s[k] > p.agent.s_sub);
        }
        // determinism
        const auto tr2 = stochastic::simulate_trajectory(p, d, spec, idx);
        CHECK(tr.Z == tr2.Z);
        CHECK(tr.Q == tr2.Q);
    }
    CHECK(found);

    // an agent above the threshold invests at time zero
    auto rich = p;
    rich.agent.w0 = 500000.0;
    const auto tr = stochastic::simulate_trajectory(rich, d, spec, 0);
    CHECK(tr.hit);
    CHECK(tr.tau_hat == 0.0);
    CHECK(tr.regime.front() == Regime::PostInvest);
}
