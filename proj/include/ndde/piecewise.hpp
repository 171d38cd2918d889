#pragma once

// Bounded piecewise-smooth C^n-valued functions on a compact interval with
// explicit values stored at every breakpoint. Discontinuities happen only at
// breakpoints, each piece extends continuously to its closure, and the value
// *at* a breakpoint is data, not a limit. This is the concrete function class
// the whole library works with: initial data, solutions, forcing terms.

#include "ndde/core.hpp"
#include "ndde/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <variant>

namespace ndde {

/// Which value to read at a breakpoint: the limit from the left, the stored
/// pointwise value, or the limit from the right. Away from breakpoints all
/// three agree.
enum class Side { Left, Point, Right };

/// Piece given by one polynomial per component in the local variable
/// u = t - piece_left.
struct PolyPiece {
    std::vector<Poly> comps;
};

/// Piece given by samples with linear interpolation. Node times are absolute,
/// strictly increasing, and span the closed piece; endpoint samples are the
/// one-sided limits, which may differ from the stored breakpoint values.
struct SampledPiece {
    std::vector<double> times;
    std::vector<Complex> values; // flat [node * n + component]
};

using Piece = std::variant<PolyPiece, SampledPiece>;

class PiecewiseFn {
public:
    PiecewiseFn() = default;

    /// breaks.size() == pieces.size()+1, break_values flat (breaks.size()*n).
    PiecewiseFn(int n, std::vector<double> breaks, std::vector<Piece> pieces,
                std::vector<Complex> break_values)
        : n_(n), breaks_(std::move(breaks)), pieces_(std::move(pieces)),
          break_values_(std::move(break_values)) {
        validate();
    }

    /// Break values defaulted by right-continuity (value = right limit), and
    /// the left limit at the right domain endpoint.
    PiecewiseFn(int n, std::vector<double> breaks, std::vector<Piece> pieces)
        : n_(n), breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
        break_values_.assign(breaks_.size() * std::size_t(n_), Complex{0.0, 0.0});
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
            for (int k = 0; k < n_; ++k)
                break_values_[i * n_ + k] = piece_boundary_value(i, k, /*left_end=*/true);
        if (!pieces_.empty())
            for (int k = 0; k < n_; ++k)
                break_values_[(breaks_.size() - 1) * n_ + k] =
                    piece_boundary_value(pieces_.size() - 1, k, /*left_end=*/false);
        validate();
    }

    [[nodiscard]] static PiecewiseFn constant(int n, double a, double b, const Vec& value) {
        std::vector<Poly> comps(n);
        for (int k = 0; k < n; ++k) comps[k] = Poly{value[std::size_t(k)]};
        return from_poly(n, a, b, std::move(comps));
    }

    [[nodiscard]] static PiecewiseFn from_poly(int n, double a, double b,
                                               std::vector<Poly> comps) {
        std::vector<Piece> pieces;
        pieces.emplace_back(PolyPiece{std::move(comps)});
        return PiecewiseFn(n, {a, b}, std::move(pieces));
    }

    /// The datum of the j-th fundamental column: 0 on [-h,0) and e_j at 0.
    [[nodiscard]] static PiecewiseFn fundamental_datum(int n, double h, int j) {
        std::vector<Poly> comps(n, Poly{Complex{0.0, 0.0}});
        PiecewiseFn phi = from_poly(n, -h, 0.0, std::move(comps));
        phi.break_values_[1 * std::size_t(n) + j] = Complex{1.0, 0.0};
        return phi;
    }

    [[nodiscard]] int dim() const { return n_; }
    [[nodiscard]] double left() const { return breaks_.front(); }
    [[nodiscard]] double right() const { return breaks_.back(); }
    [[nodiscard]] const std::vector<double>& breakpoints() const { return breaks_; }
    [[nodiscard]] std::size_t piece_count() const { return pieces_.size(); }
    [[nodiscard]] const Piece& piece(std::size_t j) const { return pieces_[j]; }
    [[nodiscard]] double piece_left(std::size_t j) const { return breaks_[j]; }
    [[nodiscard]] double piece_right(std::size_t j) const { return breaks_[j + 1]; }

    [[nodiscard]] Vec break_value(std::size_t i) const {
        Vec v(std::size_t(n_), Complex{});
        for (int k = 0; k < n_; ++k) v[std::size_t(k)] = break_values_[i * n_ + k];
        return v;
    }

    void set_break_value(std::size_t i, const Vec& v) {
        for (int k = 0; k < n_; ++k) break_values_[i * n_ + k] = v[std::size_t(k)];
    }

    /// Index of the breakpoint within snapping tolerance of t, or -1.
    [[nodiscard]] int breakpoint_index(double t) const {
        auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t - kTimeTol);
        if (it != breaks_.end() && std::abs(*it - t) <= kTimeTol)
            return int(it - breaks_.begin());
        return -1;
    }

    /// Piece whose closure contains t; ties at breakpoints resolve to the
    /// right piece unless bias_left.
    [[nodiscard]] std::size_t piece_for(double t, bool bias_left = false) const {
        const int bi = breakpoint_index(t);
        if (bi >= 0) {
            if (bias_left) return bi > 0 ? std::size_t(bi - 1) : 0;
            return std::size_t(bi) < pieces_.size() ? std::size_t(bi) : pieces_.size() - 1;
        }
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        if (it == breaks_.begin() || it == breaks_.end()) {
            if (t < breaks_.front() || t > breaks_.back())
                throw OutOfDomainError("piece_for: t outside domain");
        }
        return std::size_t(it - breaks_.begin()) - 1;
    }

    [[nodiscard]] Complex eval_comp(double t, int k, Side side = Side::Point) const {
        if (t < breaks_.front() - kTimeTol || t > breaks_.back() + kTimeTol)
            throw OutOfDomainError("eval: t outside domain");
        const int bi = breakpoint_index(t);
        if (bi < 0) {
            const std::size_t j = piece_for(t);
            return piece_value(j, t, k);
        }
        switch (side) {
        case Side::Point:
            return break_values_[std::size_t(bi) * n_ + k];
        case Side::Left:
            if (bi == 0) return break_values_[std::size_t(k)];
            return piece_boundary_value(std::size_t(bi) - 1, k, /*left_end=*/false);
        case Side::Right:
            if (std::size_t(bi) == breaks_.size() - 1)
                return break_values_[std::size_t(bi) * n_ + k];
            return piece_boundary_value(std::size_t(bi), k, /*left_end=*/true);
        }
        return {};
    }

    [[nodiscard]] Vec eval_side(double t, Side side) const {
        Vec v(std::size_t(n_), Complex{});
        for (int k = 0; k < n_; ++k) v[std::size_t(k)] = eval_comp(t, k, side);
        return v;
    }

    [[nodiscard]] Vec eval(double t) const { return eval_side(t, Side::Point); }

    /// Continuous evaluation inside piece j (one component). At the piece
    /// boundaries this is the one-sided limit, never the stored breakpoint
    /// value; integration code wants exactly that.
    [[nodiscard]] Complex piece_interp(std::size_t j, double t, int k) const {
        return piece_value(j, t, k);
    }

    /// The segment v_t: s -> v(t+s) on [-h, 0]. Interior breakpoints shift,
    /// stored breakpoint values travel with them, and the endpoint values are
    /// the pointwise values of v at t-h and t.
    [[nodiscard]] PiecewiseFn segment(double t, double h) const {
        const double wl = t - h, wr = t;
        if (wl < left() - 1e-9 || wr > right() + 1e-9)
            throw OutOfDomainError("segment: [t-h, t] not contained in domain");

        std::vector<double> nb{-h};
        for (double b : breaks_)
            if (b > wl + kTimeTol && b < wr - kTimeTol) nb.push_back(b - t);
        nb.push_back(0.0);

        std::vector<Piece> np;
        std::vector<Complex> nv(nb.size() * std::size_t(n_));
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const double src = t + nb[i];
            const bool interior = (i > 0 && i + 1 < nb.size());
            for (int k = 0; k < n_; ++k)
                nv[i * n_ + k] = interior
                                     ? break_values_[std::size_t(breakpoint_index(src)) * n_ + k]
                                     : eval_comp(src, k, Side::Point);
        }
        for (std::size_t i = 0; i + 1 < nb.size(); ++i)
            np.push_back(clip_piece(t + nb[i], t + nb[i + 1], nb[i]));
        return PiecewiseFn(n_, std::move(nb), std::move(np), std::move(nv));
    }

    /// Restriction to [a, b] without any time shift.
    [[nodiscard]] PiecewiseFn restrict(double a, double b) const {
        if (a < left() - 1e-9 || b > right() + 1e-9 || !(b > a))
            throw OutOfDomainError("restrict: bad subinterval");
        std::vector<double> nb{a};
        for (double bp : breaks_)
            if (bp > a + kTimeTol && bp < b - kTimeTol) nb.push_back(bp);
        nb.push_back(b);
        std::vector<Piece> np;
        std::vector<Complex> nv(nb.size() * std::size_t(n_));
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const bool interior = (i > 0 && i + 1 < nb.size());
            for (int k = 0; k < n_; ++k)
                nv[i * n_ + k] =
                    interior ? break_values_[std::size_t(breakpoint_index(nb[i])) * n_ + k]
                             : eval_comp(nb[i], k, Side::Point);
        }
        for (std::size_t i = 0; i + 1 < nb.size(); ++i)
            np.push_back(clip_piece(nb[i], nb[i + 1], nb[i]));
        return PiecewiseFn(n_, std::move(nb), std::move(np), std::move(nv));
    }

    /// Supremum of the max-norm over the domain. Exact for sampled and for
    /// polynomial pieces of degree <= 3 (critical points of the modulus
    /// squared); dense sampling otherwise.
    [[nodiscard]] double sup_norm() const {
        double m = 0.0;
        for (std::size_t i = 0; i < breaks_.size(); ++i)
            for (int k = 0; k < n_; ++k) m = std::max(m, std::abs(break_values_[i * n_ + k]));
        for (std::size_t j = 0; j < pieces_.size(); ++j) {
            const double len = breaks_[j + 1] - breaks_[j];
            if (const auto* pp = std::get_if<PolyPiece>(&pieces_[j])) {
                for (int k = 0; k < n_; ++k) {
                    const Poly& p = pp->comps[std::size_t(k)];
                    m = std::max(m, std::abs(poly_eval(p, 0.0)));
                    m = std::max(m, std::abs(poly_eval(p, len)));
                    if (p.size() <= 4) {
                        for (double r : modsq_critical_points(p, len))
                            m = std::max(m, std::abs(poly_eval(p, r)));
                    } else {
                        const int samples = std::max<int>(64, 16 * int(p.size()));
                        for (int s = 1; s < samples; ++s)
                            m = std::max(m, std::abs(poly_eval(p, len * s / samples)));
                    }
                }
            } else {
                const auto& sp = std::get<SampledPiece>(pieces_[j]);
                for (const Complex& z : sp.values) m = std::max(m, std::abs(z));
            }
        }
        return m;
    }

    /// Breakpoints where |left limit - stored value| exceeds tol, paired with
    /// the jump vector (value minus left limit).
    [[nodiscard]] std::vector<std::pair<double, Vec>> jumps(double tol = 1e-12) const {
        std::vector<std::pair<double, Vec>> out;
        for (std::size_t i = 1; i < breaks_.size(); ++i) {
            Vec j(std::size_t(n_), Complex{});
            double mag = 0.0;
            for (int k = 0; k < n_; ++k) {
                j[std::size_t(k)] = break_values_[i * n_ + k] -
                                    piece_boundary_value(i - 1, k, /*left_end=*/false);
                mag = std::max(mag, std::abs(j[std::size_t(k)]));
            }
            if (mag > tol) out.emplace_back(breaks_[i], std::move(j));
        }
        return out;
    }

private:
    friend PiecewiseFn concat(const PiecewiseFn&, const PiecewiseFn&);
    friend PiecewiseFn approximate_by_continuous(const PiecewiseFn&, int);
    friend PiecewiseFn pw_scale(Complex, const PiecewiseFn&);

    void validate() const {
        if (n_ <= 0) throw DimensionError("PiecewiseFn: dimension must be positive");
        if (breaks_.size() < 2 || pieces_.size() + 1 != breaks_.size())
            throw DomainMismatchError("PiecewiseFn: breakpoint/piece count mismatch");
        if (break_values_.size() != breaks_.size() * std::size_t(n_))
            throw DimensionError("PiecewiseFn: break value count mismatch");
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
            if (!(breaks_[i] < breaks_[i + 1]))
                throw DomainMismatchError("PiecewiseFn: breakpoints not strictly increasing");
        for (std::size_t j = 0; j < pieces_.size(); ++j) {
            if (const auto* pp = std::get_if<PolyPiece>(&pieces_[j])) {
                if (pp->comps.size() != std::size_t(n_))
                    throw DimensionError("PiecewiseFn: poly piece component count");
            } else {
                const auto& sp = std::get<SampledPiece>(pieces_[j]);
                if (sp.times.size() < 2 || sp.values.size() != sp.times.size() * std::size_t(n_))
                    throw DimensionError("PiecewiseFn: sampled piece shape");
            }
        }
    }

    [[nodiscard]] Complex piece_value(std::size_t j, double t, int k) const {
        if (const auto* pp = std::get_if<PolyPiece>(&pieces_[j]))
            return poly_eval(pp->comps[std::size_t(k)], t - breaks_[j]);
        const auto& sp = std::get<SampledPiece>(pieces_[j]);
        auto it = std::upper_bound(sp.times.begin(), sp.times.end(), t);
        std::size_t hi = std::size_t(it - sp.times.begin());
        if (hi == 0) hi = 1;
        if (hi >= sp.times.size()) hi = sp.times.size() - 1;
        const std::size_t lo = hi - 1;
        const double dt = sp.times[hi] - sp.times[lo];
        const double w = dt > 0.0 ? (t - sp.times[lo]) / dt : 0.0;
        return (1.0 - w) * sp.values[lo * n_ + k] + w * sp.values[hi * n_ + k];
    }

    [[nodiscard]] Complex piece_boundary_value(std::size_t j, int k, bool left_end) const {
        if (const auto* pp = std::get_if<PolyPiece>(&pieces_[j]))
            return poly_eval(pp->comps[std::size_t(k)],
                             left_end ? 0.0 : breaks_[j + 1] - breaks_[j]);
        const auto& sp = std::get<SampledPiece>(pieces_[j]);
        const std::size_t node = left_end ? 0 : sp.times.size() - 1;
        return sp.values[node * n_ + k];
    }

    /// Clip the piece covering [wl, wr] to that window and move its left end
    /// to new_left in the output time coordinate (shift by new_left - wl).
    [[nodiscard]] Piece clip_piece(double wl, double wr, double new_left) const {
        const std::size_t j = piece_for(0.5 * (wl + wr));
        const double shift = new_left - wl;
        if (const auto* pp = std::get_if<PolyPiece>(&pieces_[j])) {
            std::vector<Poly> comps(std::size_t(n_), Poly{});
            for (int k = 0; k < n_; ++k)
                comps[std::size_t(k)] = poly_shift(pp->comps[std::size_t(k)], wl - breaks_[j]);
            return PolyPiece{std::move(comps)};
        }
        const auto& sp = std::get<SampledPiece>(pieces_[j]);
        SampledPiece out;
        out.times.push_back(new_left);
        for (int k = 0; k < n_; ++k) out.values.push_back(piece_value(j, wl, k));
        for (std::size_t i = 0; i < sp.times.size(); ++i) {
            if (sp.times[i] > wl + kTimeTol && sp.times[i] < wr - kTimeTol) {
                out.times.push_back(sp.times[i] + shift);
                for (int k = 0; k < n_; ++k) out.values.push_back(sp.values[i * n_ + k]);
            }
        }
        out.times.push_back(wr + shift);
        for (int k = 0; k < n_; ++k) out.values.push_back(piece_value(j, wr, k));
        return out;
    }

    /// Real critical points of |p(u)|^2 in (0, len), for degree(p) <= 3.
    [[nodiscard]] static std::vector<double> modsq_critical_points(const Poly& p, double len) {
        RealPoly re(p.size()), im(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            re[i] = p[i].real();
            im[i] = p[i].imag();
        }
        auto sq = [](const RealPoly& a) {
            RealPoly r(2 * a.size() - 1, 0.0);
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = 0; j < a.size(); ++j) r[i + j] += a[i] * a[j];
            return r;
        };
        RealPoly modsq = sq(re);
        const RealPoly imsq = sq(im);
        for (std::size_t i = 0; i < imsq.size(); ++i) modsq[i] += imsq[i];
        return real_poly_roots(real_poly_derivative(modsq), 0.0, len);
    }

    int n_ = 0;
    std::vector<double> breaks_;
    std::vector<Piece> pieces_;
    std::vector<Complex> break_values_;
};

/// Join two functions on adjacent domains. Jumps at the junction are allowed;
/// the stored value there is taken from w (right-continuity preference).
[[nodiscard]] inline PiecewiseFn concat(const PiecewiseFn& v, const PiecewiseFn& w) {
    if (v.dim() != w.dim()) throw DimensionError("concat: dimension mismatch");
    if (std::abs(v.right() - w.left()) > kTimeTol)
        throw DomainMismatchError("concat: domains do not abut");
    const int n = v.dim();
    std::vector<double> nb = v.breaks_;
    std::vector<Piece> np = v.pieces_;
    std::vector<Complex> nv = v.break_values_;
    for (int k = 0; k < n; ++k)
        nv[(nb.size() - 1) * n + k] = w.break_values_[std::size_t(k)];
    for (std::size_t i = 1; i < w.breaks_.size(); ++i) {
        nb.push_back(w.breaks_[i]);
        for (int k = 0; k < n; ++k) nv.push_back(w.break_values_[i * n + k]);
    }
    for (const auto& p : w.pieces_) np.push_back(p);
    return PiecewiseFn(n, std::move(nb), std::move(np), std::move(nv));
}

/// Constant continuation: equals phi on its domain and phi(right) beyond,
/// up to time T.
[[nodiscard]] inline PiecewiseFn continue_const(const PiecewiseFn& phi, double T) {
    if (!(T > phi.right()))
        throw OutOfDomainError("continue_const: T must exceed the right endpoint");
    return concat(phi, PiecewiseFn::constant(phi.dim(), phi.right(), T, phi.eval(phi.right())));
}

/// The mollification that realizes pointwise approximation by continuous
/// maps: ahead of each jump breakpoint t the function is replaced on
/// (t - 1/m, t) by the line from phi(t - 1/m) to the stored value phi(t).
/// Continuous input comes back unchanged; sup norms never grow; pointwise
/// convergence as m -> infinity, with equality at every jump point.
[[nodiscard]] inline PiecewiseFn approximate_by_continuous(const PiecewiseFn& phi, int m) {
    if (m <= 0) throw ConfigError("approximate_by_continuous: m must be positive");
    const auto& br = phi.breakpoints();
    const int n = phi.dim();
    const double step = 1.0 / m;
    std::vector<double> jump_times;
    for (const auto& [t, j] : phi.jumps()) jump_times.push_back(t);
    for (double t : jump_times) {
        for (std::size_t i = 1; i < br.size(); ++i)
            if (std::abs(br[i] - t) <= kTimeTol && !(step < br[i] - br[i - 1]))
                throw GapTooSmallError(
                    "approximate_by_continuous: 1/m does not fit ahead of a jump");
    }

    std::vector<double> nb;
    std::vector<Piece> np;
    std::vector<Complex> nv;
    auto push_break = [&](double t, const Vec& val) {
        nb.push_back(t);
        for (int k = 0; k < n; ++k) nv.push_back(val[std::size_t(k)]);
    };

    push_break(br.front(), phi.break_value(0));
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double l = br[i], r = br[i + 1];
        const bool jump_ahead =
            std::find_if(jump_times.begin(), jump_times.end(),
                         [&](double t) { return std::abs(t - r) <= kTimeTol; }) !=
            jump_times.end();
        if (!jump_ahead) {
            np.push_back(phi.clip_piece(l, r, l));
        } else {
            const double c = r - step;
            const Vec at_c = phi.eval(c);
            const Vec at_r = phi.eval(r);
            np.push_back(phi.clip_piece(l, c, l));
            push_break(c, at_c);
            std::vector<Poly> line(std::size_t(n), Poly{});
            for (int k = 0; k < n; ++k)
                line[std::size_t(k)] =
                    Poly{at_c[std::size_t(k)],
                         (at_r[std::size_t(k)] - at_c[std::size_t(k)]) * double(m)};
            np.emplace_back(PolyPiece{std::move(line)});
        }
        push_break(r, phi.break_value(i + 1));
    }
    return PiecewiseFn(n, std::move(nb), std::move(np), std::move(nv));
}

[[nodiscard]] inline PiecewiseFn pw_scale(Complex c, const PiecewiseFn& a) {
    PiecewiseFn r = a;
    for (auto& z : r.break_values_) z *= c;
    for (auto& piece : r.pieces_) {
        if (auto* pp = std::get_if<PolyPiece>(&piece)) {
            for (auto& comp : pp->comps) comp = poly_scale(c, comp);
        } else {
            for (auto& z : std::get<SampledPiece>(piece).values) z *= c;
        }
    }
    return r;
}

/// Pointwise sum on a common domain. Poly pieces add exactly; anything
/// involving samples is resampled on the union of the two node sets with
/// one-sided values at the seams.
[[nodiscard]] inline PiecewiseFn pw_add(const PiecewiseFn& a, const PiecewiseFn& b) {
    if (a.dim() != b.dim()) throw DimensionError("pw_add: dimension mismatch");
    if (std::abs(a.left() - b.left()) > kTimeTol || std::abs(a.right() - b.right()) > kTimeTol)
        throw DomainMismatchError("pw_add: domains differ");
    const int n = a.dim();

    std::vector<double> nb = a.breakpoints();
    for (double t : b.breakpoints()) nb.push_back(t);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end(),
                         [](double x, double y) { return std::abs(x - y) <= kTimeTol; }),
             nb.end());
    nb.front() = a.left();
    nb.back() = a.right();

    std::vector<Complex> nv(nb.size() * std::size_t(n));
    for (std::size_t i = 0; i < nb.size(); ++i)
        for (int k = 0; k < n; ++k)
            nv[i * n + k] = a.eval_comp(nb[i], k) + b.eval_comp(nb[i], k);

    std::vector<Piece> np;
    for (std::size_t i = 0; i + 1 < nb.size(); ++i) {
        const double l = nb[i], r = nb[i + 1];
        const std::size_t ja = a.piece_for(0.5 * (l + r));
        const std::size_t jb = b.piece_for(0.5 * (l + r));
        const auto* pa = std::get_if<PolyPiece>(&a.piece(ja));
        const auto* pb = std::get_if<PolyPiece>(&b.piece(jb));
        if (pa && pb) {
            std::vector<Poly> comps(std::size_t(n), Poly{});
            for (int k = 0; k < n; ++k)
                comps[std::size_t(k)] =
                    poly_add(poly_shift(pa->comps[std::size_t(k)], l - a.piece_left(ja)),
                             poly_shift(pb->comps[std::size_t(k)], l - b.piece_left(jb)));
            np.emplace_back(PolyPiece{std::move(comps)});
            continue;
        }
        std::vector<double> ts{l};
        auto collect = [&](const PiecewiseFn& f, std::size_t j) {
            if (const auto* sp = std::get_if<SampledPiece>(&f.piece(j)))
                for (double t : sp->times)
                    if (t > l + kTimeTol && t < r - kTimeTol) ts.push_back(t);
        };
        collect(a, ja);
        collect(b, jb);
        ts.push_back(r);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end(),
                             [](double x, double y) { return std::abs(x - y) <= kTimeTol; }),
                 ts.end());
        SampledPiece sp;
        sp.times = ts;
        sp.values.resize(ts.size() * std::size_t(n));
        for (std::size_t s = 0; s < ts.size(); ++s) {
            const Side side = s == 0 ? Side::Right : (s + 1 == ts.size() ? Side::Left : Side::Point);
            for (int k = 0; k < n; ++k)
                sp.values[s * n + k] = a.eval_comp(ts[s], k, side) + b.eval_comp(ts[s], k, side);
        }
        np.emplace_back(std::move(sp));
    }
    return PiecewiseFn(n, std::move(nb), std::move(np), std::move(nv));
}

[[nodiscard]] inline PiecewiseFn pw_lincomb(Complex ca, const PiecewiseFn& a, Complex cb,
                                            const PiecewiseFn& b) {
    return pw_add(pw_scale(ca, a), pw_scale(cb, b));
}

} // namespace ndde
