#pragma once

// Closed-form method of steps for atom-only neutral equations with
// piecewise-polynomial data. On every interval between propagated
// breakpoints the delayed terms refer to earlier intervals, so the solution
// is an explicit polynomial; the only error anywhere is rounding.
//
// This module is the ground truth the numeric solver is tested against. It
// deliberately shares no code with the quadrature/measure machinery: the
// polynomial arithmetic below is local to this header.

#include "ndde/core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ndde::exact {

/// Dense n x n complex matrix, row-major: coeff[j * n + k] maps input
/// component k to output component j.
using Matrix = std::vector<Complex>;

/// One atom block: coeff * v(t - tau).
struct DelayTerm {
    double tau = 0.0;
    Matrix coeff;
};

namespace detail {

using CPoly = std::vector<Complex>;

inline Complex eval(const CPoly& p, double u) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
    return acc;
}

inline void axpy(CPoly& dst, Complex c, const CPoly& src) {
    if (dst.size() < src.size()) dst.resize(src.size(), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += c * src[i];
}

/// p(delta + u) as a polynomial in u.
inline CPoly shift(const CPoly& p, double delta) {
    CPoly r(std::max<std::size_t>(p.size(), 1), Complex{0.0, 0.0});
    for (std::size_t k = p.size(); k-- > 0;) {
        for (std::size_t i = r.size(); i-- > 1;) r[i] = r[i - 1] + delta * r[i];
        r[0] = delta * r[0] + p[k];
    }
    return r;
}

/// p(alpha + beta*u) as a polynomial in u.
inline CPoly compose_linear(const CPoly& p, double alpha, double beta) {
    CPoly r{Complex{0.0, 0.0}};
    for (std::size_t k = p.size(); k-- > 0;) {
        CPoly next(r.size() + 1, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < r.size(); ++i) {
            next[i] += alpha * r[i];
            next[i + 1] += beta * r[i];
        }
        next[0] += p[k];
        r = std::move(next);
    }
    return r;
}

inline CPoly mul(const CPoly& a, const CPoly& b) {
    if (a.empty() || b.empty()) return {Complex{0.0, 0.0}};
    CPoly r(a.size() + b.size() - 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline CPoly antiderivative(const CPoly& p) {
    CPoly r(p.size() + 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < p.size(); ++i) r[i + 1] = p[i] / double(i + 1);
    return r;
}

inline Complex integral(const CPoly& p, double a, double b) {
    const CPoly F = antiderivative(p);
    return eval(F, b) - eval(F, a);
}

} // namespace detail

/// Piecewise polynomial with stored pointwise values at breakpoints. The
/// polynomial of piece p lives in the local variable u = t - breaks[p].
struct PiecewisePoly {
    int n = 1;
    std::vector<double> breaks;
    std::vector<std::vector<detail::CPoly>> pieces; // [piece][component]
    std::vector<Complex> values;                    // flat [break * n + component]

    [[nodiscard]] static PiecewisePoly constant(int n, double a, double b, const Vec& value) {
        PiecewisePoly f;
        f.n = n;
        f.breaks = {a, b};
        f.pieces.resize(1);
        f.values.resize(2 * std::size_t(n));
        for (int k = 0; k < n; ++k) {
            f.pieces[0].push_back({value[std::size_t(k)]});
            f.values[std::size_t(k)] = value[std::size_t(k)];
            f.values[std::size_t(n) + k] = value[std::size_t(k)];
        }
        return f;
    }

    /// 0 on [-h, 0) with value e_j at 0.
    [[nodiscard]] static PiecewisePoly fundamental_datum(int n, double h, int j) {
        PiecewisePoly f = constant(n, -h, 0.0, Vec(std::size_t(n), Complex{0.0, 0.0}));
        f.values[std::size_t(n) + j] = Complex{1.0, 0.0};
        return f;
    }

    [[nodiscard]] int break_index(double t) const {
        auto it = std::lower_bound(breaks.begin(), breaks.end(), t - 1e-9);
        if (it != breaks.end() && std::abs(*it - t) <= 1e-9) return int(it - breaks.begin());
        return -1;
    }

    [[nodiscard]] std::size_t piece_for(double t) const {
        auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
        std::size_t j = it == breaks.begin() ? 0 : std::size_t(it - breaks.begin()) - 1;
        return std::min(j, pieces.size() - 1);
    }

    [[nodiscard]] Complex at(double t, int k) const {
        const int bi = break_index(t);
        if (bi >= 0) return values[std::size_t(bi) * n + k];
        const std::size_t j = piece_for(t);
        return detail::eval(pieces[j][std::size_t(k)], t - breaks[j]);
    }

    [[nodiscard]] Complex left_limit(double t, int k) const {
        const int bi = break_index(t);
        if (bi <= 0) return at(t, k);
        return detail::eval(pieces[std::size_t(bi) - 1][std::size_t(k)],
                            breaks[std::size_t(bi)] - breaks[std::size_t(bi) - 1]);
    }

    [[nodiscard]] Vec at(double t) const {
        Vec v(std::size_t(n), Complex{});
        for (int k = 0; k < n; ++k) v[std::size_t(k)] = at(t, k);
        return v;
    }

    /// value - left limit at breakpoint time t.
    [[nodiscard]] Vec jump_at(double t) const {
        Vec v(std::size_t(n), Complex{});
        for (int k = 0; k < n; ++k) v[std::size_t(k)] = at(t, k) - left_limit(t, k);
        return v;
    }
};

namespace detail {

inline void check_terms(int n, const std::vector<DelayTerm>& terms, const char* what) {
    for (const auto& term : terms) {
        if (term.coeff.size() != std::size_t(n) * std::size_t(n))
            throw DimensionError("exact: coefficient matrix has wrong shape");
        if (!(term.tau > 0.0))
            throw UnsupportedMeasureError(std::string("exact: ") + what +
                                          " delay must be strictly positive");
    }
}

inline std::vector<double> closure(std::vector<double> seeds, const std::vector<double>& delays,
                                   double T) {
    std::vector<double> out;
    auto known = [&](double t) {
        return std::any_of(out.begin(), out.end(),
                           [&](double s) { return std::abs(s - t) <= 1e-9; });
    };
    std::vector<double> queue = std::move(seeds);
    while (!queue.empty()) {
        const double t = queue.back();
        queue.pop_back();
        if (t > T + 1e-9 || known(t)) continue;
        out.push_back(t);
        for (double tau : delays) queue.push_back(t + tau);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// Closed-form solve of the integrated neutral equation with atom-only L and
/// R, piecewise-polynomial datum phi on [-h, 0], and optional polynomial
/// forcing q on [0, T]:
///   v(t) = sum_i A_i v(t - tau_i) + [phi(0) - sum_i A_i phi(-tau_i)]
///        + int_0^t sum_i B_i v(s - sigma_i) ds + int_0^t q(s) ds.
[[nodiscard]] inline PiecewisePoly solve(int n, const std::vector<DelayTerm>& L,
                                         const std::vector<DelayTerm>& R,
                                         const PiecewisePoly& phi, const PiecewisePoly* q,
                                         double T) {
    detail::check_terms(n, L, "neutral");
    detail::check_terms(n, R, "retarded");
    if (phi.n != n || (q && q->n != n)) throw DimensionError("exact::solve: dimension mismatch");
    if (!(T > 0.0)) throw ConfigError("exact::solve: T must be positive");
    if (std::abs(phi.breaks.back()) > 1e-9)
        throw DomainMismatchError("exact::solve: datum domain must end at 0");
    if (q && (q->breaks.front() > 1e-9 || q->breaks.back() < T - 1e-9))
        throw DomainMismatchError("exact::solve: forcing must cover [0, T]");

    std::vector<double> delays;
    for (const auto& term : L) delays.push_back(term.tau);
    for (const auto& term : R) delays.push_back(term.tau);

    std::vector<double> seeds{0.0};
    for (std::size_t i = 1; i + 1 < phi.breaks.size(); ++i) seeds.push_back(phi.breaks[i]);
    if (q)
        for (std::size_t i = 1; i + 1 < q->breaks.size(); ++i) seeds.push_back(q->breaks[i]);
    std::vector<double> grid = detail::closure(std::move(seeds), delays, T);
    grid.erase(std::remove_if(grid.begin(), grid.end(),
                              [&](double t) { return t < 1e-9 || t > T - 1e-9; }),
               grid.end());
    grid.insert(grid.begin(), 0.0);
    grid.push_back(T);

    PiecewisePoly v = phi;
    v.breaks.reserve(v.breaks.size() + grid.size());
    Vec c0(std::size_t(n), Complex{0.0, 0.0}); // phi(0) - L(phi), pointwise reads
    for (int k = 0; k < n; ++k) c0[std::size_t(k)] = phi.at(0.0, k);
    for (const auto& term : L)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                c0[std::size_t(j)] -= term.coeff[std::size_t(j) * n + k] * phi.at(-term.tau, k);

    Vec g_acc(std::size_t(n), Complex{0.0, 0.0}); // accumulated integral term at piece starts
    for (std::size_t gi = 0; gi + 1 < grid.size(); ++gi) {
        const double l = grid[gi], r = grid[gi + 1];

        // Delayed polynomial of f(t - tau) on (l, r), local in u = t - l.
        auto delayed = [&](const PiecewisePoly& f, double tau, int k) {
            const double mid = 0.5 * (l + r) - tau;
            const std::size_t j = f.piece_for(mid);
            return detail::shift(f.pieces[j][std::size_t(k)], l - tau - f.breaks[j]);
        };

        std::vector<detail::CPoly> comp(std::size_t(n), detail::CPoly{Complex{0.0, 0.0}});
        for (const auto& term : L)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    detail::axpy(comp[std::size_t(j)], term.coeff[std::size_t(j) * n + k],
                                 delayed(v, term.tau, k));
        for (int j = 0; j < n; ++j) detail::axpy(comp[std::size_t(j)], Complex{1.0, 0.0},
                                                 detail::CPoly{c0[std::size_t(j)]});

        // Integrand of the running integral on this interval, then its
        // antiderivative anchored at the accumulated value g_acc.
        std::vector<detail::CPoly> integrand(std::size_t(n), detail::CPoly{Complex{0.0, 0.0}});
        for (const auto& term : R)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    detail::axpy(integrand[std::size_t(j)], term.coeff[std::size_t(j) * n + k],
                                 delayed(v, term.tau, k));
        if (q) {
            const std::size_t jq = q->piece_for(0.5 * (l + r));
            for (int k = 0; k < n; ++k)
                detail::axpy(integrand[std::size_t(k)], Complex{1.0, 0.0},
                             detail::shift(q->pieces[jq][std::size_t(k)], l - q->breaks[jq]));
        }
        for (int k = 0; k < n; ++k) {
            detail::CPoly G = detail::antiderivative(integrand[std::size_t(k)]);
            G[0] += g_acc[std::size_t(k)];
            detail::axpy(comp[std::size_t(k)], Complex{1.0, 0.0}, G);
            g_acc[std::size_t(k)] += detail::integral(integrand[std::size_t(k)], 0.0, r - l);
        }

        // Pointwise value at the right breakpoint: atom reads use stored
        // values, the integral part is insensitive to them.
        Vec val(std::size_t(n), Complex{0.0, 0.0});
        for (int k = 0; k < n; ++k) val[std::size_t(k)] = c0[std::size_t(k)] + g_acc[std::size_t(k)];
        for (const auto& term : L)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    val[std::size_t(j)] +=
                        term.coeff[std::size_t(j) * n + k] * v.at(r - term.tau, k);

        v.breaks.push_back(r);
        v.pieces.push_back(std::move(comp));
        for (int k = 0; k < n; ++k) v.values.push_back(val[std::size_t(k)]);
    }
    return v;
}

/// The n fundamental columns on [-h, T]: column j solves the integrated
/// equation from the datum that vanishes on [-h, 0) and equals e_j at 0.
[[nodiscard]] inline std::vector<PiecewisePoly> fundamental(int n, double h,
                                                            const std::vector<DelayTerm>& L,
                                                            const std::vector<DelayTerm>& R,
                                                            double T) {
    std::vector<PiecewisePoly> cols;
    cols.reserve(std::size_t(n));
    for (int j = 0; j < n; ++j)
        cols.push_back(solve(n, L, R, PiecewisePoly::fundamental_datum(n, h, j), nullptr, T));
    return cols;
}

/// Exact p(t) = int_(0,t) X(t-s) q(s) ds with X given by its columns.
/// Piecewise-polynomial products integrate in closed form after splitting at
/// the images of the column breakpoints and at q's breakpoints.
[[nodiscard]] inline Vec convolve(const std::vector<PiecewisePoly>& columns,
                                  const PiecewisePoly& q, double t) {
    const int n = int(columns.size());
    Vec out(std::size_t(n), Complex{0.0, 0.0});
    if (!(t > 0.0)) return out;

    std::vector<double> cuts{0.0, t};
    for (const auto& col : columns)
        for (double b : col.breaks)
            if (t - b > 1e-9 && t - b < t - 1e-9) cuts.push_back(t - b);
    for (double b : q.breaks)
        if (b > 1e-9 && b < t - 1e-9) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-9; }),
               cuts.end());

    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        const double mid = 0.5 * (a + b);
        const std::size_t jq = q.piece_for(mid);
        for (int l = 0; l < n; ++l) {
            const auto& col = columns[std::size_t(l)];
            const std::size_t jx = col.piece_for(t - mid);
            // q_l(s) as a polynomial in u = s - a.
            const detail::CPoly ql = detail::shift(q.pieces[jq][std::size_t(l)], a - q.breaks[jq]);
            for (int k = 0; k < n; ++k) {
                // X_{l,k}(t - s) = piece(t - s - x_left) with t - s = (t - a) - u.
                const detail::CPoly xk = detail::compose_linear(
                    col.pieces[jx][std::size_t(k)], t - a - col.breaks[jx], -1.0);
                out[std::size_t(k)] += detail::integral(detail::mul(xk, ql), 0.0, b - a);
            }
        }
    }
    return out;
}

} // namespace ndde::exact
