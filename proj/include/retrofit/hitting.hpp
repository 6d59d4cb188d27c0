// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>

#include "retrofit/common.hpp"
#include "retrofit/math.hpp"

// First-passage law of a geometric Brownian motion through an upper barrier.
//
// Let Z be GBM with drift mu and volatility sigma, starting at z below the
// barrier z_bar.  In normalised coordinates
//     b  = ln(z_bar / z) / sigma          (distance to the barrier)
//     nu = (mu - sigma^2/2) / sigma       (drift of the driving BM)
// the first-passage time tau of ln Z through ln z_bar has the inverse
// Gaussian law with
//     P(tau <= t) = Phi((nu t - b)/sqrt(t)) + e^(2 nu b) Phi((-b - nu t)/sqrt(t)),
//     density     = b / sqrt(2 pi t^3) * exp(-(b - nu t)^2 / (2 t)),
//     E[e^(-r tau)] = exp((nu - sqrt(nu^2 + 2 r)) b),   r > 0.
// Under the patience condition nu > 0 the barrier is reached almost surely.

namespace retrofit::hitting {

struct Barrier {
    double b;  // normalised log-distance, >= 0 when z <= z_bar
    double nu; // normalised drift
};

inline Barrier barrier(double z, double z_bar, double mu, double sigma) {
    if (z <= 0.0 || z_bar <= 0.0) throw DomainError("first passage: levels must be positive");
    if (sigma <= 0.0) throw DomainError("first passage: volatility must be positive");
    return {std::log(z_bar / z) / sigma, (mu - 0.5 * sigma * sigma) / sigma};
}

// P(tau <= t).  Already-crossed states (z >= z_bar) give 1 for t >= 0.
inline double cdf(double z, double z_bar, double mu, double sigma, double t) {
    if (t < 0.0) throw DomainError("first passage: time must be non-negative");
    if (z >= z_bar) return 1.0;
    if (t == 0.0) return 0.0;
    const auto [b, nu] = barrier(z, z_bar, mu, sigma);
    const double rt = std::sqrt(t);
    const double term1 = math::norm_cdf((nu * t - b) / rt);
    // The reflection term e^(2 nu b) Phi(...) multiplies a huge exponential
    // by a tiny tail when nu b is large; switch to log form before the
    // product can overflow.
    const double expo = 2.0 * nu * b;
    const double arg2 = (-b - nu * t) / rt;
    double term2;
    if (expo < 300.0) {
        term2 = std::exp(expo) * math::norm_cdf(arg2);
    } else {
        // ln Phi(x) ~ -x^2/2 - ln(-x sqrt(2 pi)) for x << 0
        const double log_phi = -0.5 * arg2 * arg2 - std::log(-arg2 / math::inv_sqrt2pi);
        term2 = std::exp(expo + log_phi);
    }
    return std::min(1.0, term1 + term2);
}

// Density of tau at t.  Returns 0 for t <= 0 and for z >= z_bar (where the
// law has an atom at 0 that the caller must handle through the CDF).
inline double pdf(double z, double z_bar, double mu, double sigma, double t) {
    if (z >= z_bar || t <= 0.0) return 0.0;
    const auto [b, nu] = barrier(z, z_bar, mu, sigma);
    const double e = b - nu * t;
    const double expo = -0.5 * e * e / t;
    if (expo < -745.0) return 0.0; // below double underflow, integrand is dead
    return b / std::sqrt(2.0 * M_PI * t * t * t) * std::exp(expo);
}

// Exponent of the Laplace transform: a0(r) = (nu - sqrt(nu^2 + 2 r)) / sigma,
// so that E[e^(-r tau)] = (z_bar/z)^(a0(r)).  Negative for r > 0.
inline double laplace_exponent(double mu, double sigma, double r) {
    if (r <= 0.0) throw DomainError("first passage: Laplace rate must be positive");
    if (sigma <= 0.0) throw DomainError("first passage: volatility must be positive");
    const double nu = (mu - 0.5 * sigma * sigma) / sigma;
    return (nu - std::sqrt(nu * nu + 2.0 * r)) / sigma;
}

// E[e^(-r tau)], equal to 1 when the barrier is already met.
inline double laplace(double z, double z_bar, double mu, double sigma, double r) {
    if (z >= z_bar) return 1.0;
    const auto [b, nu] = barrier(z, z_bar, mu, sigma);
    return std::exp((nu - std::sqrt(nu * nu + 2.0 * r)) * b);
}

// Integral of the hitting density against exponential growth from the
// hitting time to t:
//     I_g(t) = int_0^t pdf(u) e^(g (t - u)) du.
// This is the building block for expectations of the form
// E[h(Z_t) 1{tau <= t}] when h grows at rate g after the hit.  Evaluated by
// adaptive quadrature to a relative tolerance of 1e-8 (relative to an a
// priori scale CDF(t) e^(|g| t)).
inline double growth_integral(double z, double z_bar, double mu, double sigma, double g,
                              double t, double rel_tol = 1e-8) {
    if (t < 0.0) throw DomainError("first passage: time must be non-negative");
    if (t == 0.0) return 0.0;
    if (z >= z_bar) return std::exp(g * t); // atom at tau = 0
    const double mass = cdf(z, z_bar, mu, sigma, t);
    if (mass <= 0.0) return 0.0;
    const double scale = mass * std::exp(std::fabs(g) * t);
    return math::integrate(
        [&](double u) { return pdf(z, z_bar, mu, sigma, u) * std::exp(g * (t - u)); }, 0.0, t,
        rel_tol, scale);
}

} // namespace retrofit::hitting
