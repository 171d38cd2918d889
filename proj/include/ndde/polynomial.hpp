#pragma once

// Dense complex polynomials in one real variable, plus the little numerics
// needed around them (real root localization, adaptive quadrature of
// moduli). Coefficients are ascending: p(u) = c[0] + c[1] u + ...
// Degrees stay small everywhere in this project (<= 8 for densities).

#include "ndde/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>

namespace ndde {

using Poly = std::vector<Complex>;

[[nodiscard]] inline Complex poly_eval(const Poly& p, double u) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
    return acc;
}

[[nodiscard]] inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

[[nodiscard]] inline Poly poly_scale(Complex c, const Poly& a) {
    Poly r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

[[nodiscard]] inline Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

/// Antiderivative with zero constant term.
[[nodiscard]] inline Poly poly_antiderivative(const Poly& p) {
    Poly r(p.size() + 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < p.size(); ++i) r[i + 1] = p[i] / double(i + 1);
    return r;
}

[[nodiscard]] inline Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return {};
    Poly r(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = double(i) * p[i];
    return r;
}

/// Exact integral of p over [a, b] in the polynomial's own variable.
[[nodiscard]] inline Complex poly_integral(const Poly& p, double a, double b) {
    const Poly F = poly_antiderivative(p);
    return poly_eval(F, b) - poly_eval(F, a);
}

/// Rewrite p(delta + u) as a polynomial in u (Taylor shift).
[[nodiscard]] inline Poly poly_shift(const Poly& p, double delta) {
    if (p.empty()) return {};
    Poly r(p.size(), Complex{0.0, 0.0});
    // Horner on polynomial coefficients: r <- r*(u+delta) + c_k from the top.
    for (std::size_t k = p.size(); k-- > 0;) {
        for (std::size_t i = r.size(); i-- > 1;) r[i] = r[i - 1] + delta * r[i];
        r[0] = delta * r[0] + p[k];
    }
    return r;
}

/// Rewrite p(alpha + beta*u) as a polynomial in u.
[[nodiscard]] inline Poly poly_compose_linear(const Poly& p, double alpha, double beta) {
    Poly r{Complex{0.0, 0.0}};
    for (std::size_t k = p.size(); k-- > 0;) {
        // r <- r*(alpha + beta*u) + c_k
        Poly next(r.size() + 1, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < r.size(); ++i) {
            next[i] += alpha * r[i];
            next[i + 1] += beta * r[i];
        }
        next[0] += p[k];
        r = std::move(next);
    }
    while (r.size() > 1 && std::abs(r.back()) == 0.0) r.pop_back();
    return r;
}

[[nodiscard]] inline bool poly_is_zero(const Poly& p) {
    for (const auto& c : p)
        if (c != Complex{0.0, 0.0}) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Real roots of real polynomials on an interval
// ---------------------------------------------------------------------------

using RealPoly = std::vector<double>;

[[nodiscard]] inline double real_poly_eval(const RealPoly& p, double u) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
    return acc;
}

[[nodiscard]] inline RealPoly real_poly_derivative(const RealPoly& p) {
    if (p.size() <= 1) return {};
    RealPoly r(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = double(i) * p[i];
    return r;
}

namespace detail {

inline double bisect_root(const RealPoly& p, double lo, double hi) {
    double flo = real_poly_eval(p, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = real_poly_eval(p, mid);
        if (fm == 0.0 || hi - lo < 1e-15 * (1.0 + std::abs(mid))) return mid;
        if ((flo < 0.0) != (fm < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// All real roots of p inside [a, b], found by recursing on the derivative:
/// between consecutive extrema the polynomial is monotone, so each sign
/// change brackets exactly one root.
[[nodiscard]] inline std::vector<double> real_poly_roots(const RealPoly& p, double a, double b) {
    RealPoly q = p;
    while (!q.empty() && q.back() == 0.0) q.pop_back();
    if (q.size() <= 1) return {};
    if (q.size() == 2) {
        const double r = -q[0] / q[1];
        if (r >= a && r <= b) return {r};
        return {};
    }
    std::vector<double> knots = real_poly_roots(real_poly_derivative(q), a, b);
    knots.push_back(a);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i], hi = knots[i + 1];
        if (hi <= lo) continue;
        const double flo = real_poly_eval(q, lo), fhi = real_poly_eval(q, hi);
        if (flo == 0.0) roots.push_back(lo);
        if ((flo < 0.0) != (fhi < 0.0)) roots.push_back(detail::bisect_root(q, lo, hi));
    }
    if (!knots.empty() && real_poly_eval(q, b) == 0.0) roots.push_back(b);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-14; }),
                roots.end());
    return roots;
}

// ---------------------------------------------------------------------------
// Adaptive quadrature
// ---------------------------------------------------------------------------

namespace detail {

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson integration of a real-valued integrand. Handles the
/// |t - r| kinks of polynomial moduli by recursive refinement; rel_tol is
/// interpreted against the first whole-interval estimate.
template <typename F>
[[nodiscard]] double integrate_adaptive(const F& f, double a, double b, double rel_tol = 1e-13,
                                        int max_depth = 60) {
    if (!(b > a)) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double scale = std::max({std::abs(whole), (b - a) * std::abs(fm), 1e-300});
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale, max_depth);
}

} // namespace ndde
