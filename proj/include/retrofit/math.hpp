// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "retrofit/common.hpp"

namespace retrofit::math {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double inv_sqrt2pi = 0.39894228040143267794;

// Standard normal density.
inline double norm_pdf(double x) { return inv_sqrt2pi * std::exp(-0.5 * x * x); }

// Standard normal distribution function via the complementary error function.
// std::erfc is correctly rounded to within a few ulp, so the absolute error
// here is far below the 1e-12 the callers require, including deep in the
// tails where 1 - erf(x) would cancel.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * inv_sqrt2); }

// ---------------------------------------------------------------------------
// Forward-mode dual number.  Carries a value and one directional derivative
// through arithmetic, so pushing model parameters through the closed-form
// derivation chain yields machine-exact derivatives (no step-size error).
// ---------------------------------------------------------------------------
struct Dual {
    double v = 0.0; // value
    double d = 0.0; // derivative with respect to the seeded parameter

    Dual() = default;
    Dual(double value) : v(value), d(0.0) {} // NOLINT: implicit by design
    Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    return {q, (a.d - q * b.d) * inv};
}
inline bool operator<(Dual a, Dual b) { return a.v < b.v; }
inline bool operator>(Dual a, Dual b) { return a.v > b.v; }
inline bool operator<=(Dual a, Dual b) { return a.v <= b.v; }
inline bool operator>=(Dual a, Dual b) { return a.v >= b.v; }

inline Dual log(Dual a) { return {std::log(a.v), a.d / a.v}; }
inline Dual exp(Dual a) {
    const double e = std::exp(a.v);
    return {e, e * a.d};
}
inline Dual sqrt(Dual a) {
    const double s = std::sqrt(a.v);
    return {s, 0.5 * a.d / s};
}
// pow with a dual base and dual exponent: d(b^e) = b^e (e' ln b + e b'/b).
inline Dual pow(Dual b, Dual e) {
    const double p = std::pow(b.v, e.v);
    return {p, p * (e.d * std::log(b.v) + e.v * b.d / b.v)};
}
inline Dual pow(Dual b, double e) {
    const double p = std::pow(b.v, e);
    return {p, e * std::pow(b.v, e - 1.0) * b.d};
}
inline Dual fabs(Dual a) { return a.v < 0.0 ? -a : a; }

// Scalar accessors so templated code can read plain values from either type.
inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

// Safeguarded Newton iteration on a bracket [lo, hi] with f(lo), f(hi) of
// opposite sign.  Newton steps are taken while they stay inside the bracket
// and shrink the residual; otherwise the method falls back to bisection, so
// convergence is guaranteed.  `fdf` returns (f(x), f'(x)).
inline double newton_bisect(const std::function<std::pair<double, double>(double)>& fdf,
                            double lo, double hi, double flo, double fhi,
                            double xtol, int max_iter, const char* what) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NumericError(std::string("root not bracketed in ") + what);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        auto [f, df] = fdf(x);
        if (!std::isfinite(f) || !std::isfinite(df))
            throw NumericError(std::string("non-finite iterate in ") + what);
        if (f == 0.0) return x;
        if ((f > 0.0) == (flo > 0.0)) { lo = x; flo = f; } else { hi = x; fhi = f; }
        double step = df != 0.0 ? -f / df : std::numeric_limits<double>::infinity();
        double xn = x + step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi); // bisect when Newton leaves bracket
        if (std::fabs(xn - x) <= xtol * (1.0 + std::fabs(xn))) return xn;
        x = xn;
    }
    throw NumericError(std::string("no convergence after max iterations in ") + what);
}

// Plain bisection for functions without a cheap derivative.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol, int max_iter, const char* what) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NumericError(std::string("root not bracketed in ") + what);
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || 0.5 * (hi - lo) <= xtol * (1.0 + std::fabs(mid))) return mid;
        if ((fm > 0.0) == (flo > 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
    }
    throw NumericError(std::string("no convergence after max iterations in ") + what);
}

// ---------------------------------------------------------------------------
// Optimisation
// ---------------------------------------------------------------------------

// Golden-section search for the minimum of a unimodal function on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         double xtol) {
    constexpr double invphi = 0.61803398874989484820;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace detail {
inline double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0) throw NumericError("adaptive quadrature: recursion limit reached");
    if (std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0; // Richardson correction
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
         + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

// Adaptive Simpson quadrature of f over [a, b].  The tolerance is applied
// relative to `scale` (pass an a-priori magnitude of the integral; when zero
// the routine falls back to an absolute tolerance).
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double scale) {
    if (a == b) return 0.0;
    const double tol = rel_tol * (scale != 0.0 ? std::fabs(scale) : 1.0);
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = detail::simpson(fa, fm, fb, b - a);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

// ---------------------------------------------------------------------------
// Differentiation and reduction helpers
// ---------------------------------------------------------------------------

// Central difference with one Richardson extrapolation step: combines the
// stencils at h and h/2 so the leading O(h^2) error term cancels.
inline double richardson_derivative(const std::function<double(double)>& f, double x,
                                    double h) {
    const double d_h = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d_h2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * d_h2 - d_h) / 3.0;
}

// Deterministic pairwise reduction: the summation tree only depends on n, so
// the result is bit-identical regardless of how the inputs were produced, and
// the rounding error grows like O(log n) rather than O(n).
inline double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& x) {
    return pairwise_sum(x.data(), x.size());
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw NumericError(std::string("non-finite value in ") + what);
}

} // namespace retrofit::math
