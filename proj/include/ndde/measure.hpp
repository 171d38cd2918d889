#pragma once

// Regular complex Borel measures on [-h, 0] in the concrete representation
// this project uses: finitely many atoms plus a piecewise-polynomial density.
// An n x n grid of such measures realizes a continuous linear functional
// C([-h,0], C^n) -> C^n together with its extension to bounded piecewise
// data: integration against the measures *is* the extension, and the value
// of the argument at an atom is read pointwise, not as a limit.

#include "ndde/core.hpp"
#include "ndde/piecewise.hpp"
#include "ndde/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ndde {

struct Atom {
    double at = 0.0;
    Complex weight{0.0, 0.0};
};

/// Density on [from, to], polynomial in the local variable u = t - from.
struct DensityPiece {
    double from = 0.0;
    double to = 0.0;
    Poly coeffs;
};

class ComplexMeasure {
public:
    ComplexMeasure() = default;

    explicit ComplexMeasure(double h) : h_(h) {
        if (!(h > 0.0)) throw ConfigError("ComplexMeasure: h must be positive");
    }

    ComplexMeasure(double h, std::vector<Atom> atoms, std::vector<DensityPiece> densities)
        : h_(h), atoms_(std::move(atoms)), densities_(std::move(densities)) {
        validate();
    }

    [[nodiscard]] double horizon() const { return h_; }
    [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
    [[nodiscard]] const std::vector<DensityPiece>& densities() const { return densities_; }

    [[nodiscard]] bool is_zero() const {
        for (const auto& a : atoms_)
            if (a.weight != Complex{0.0, 0.0}) return false;
        for (const auto& d : densities_)
            if (!poly_is_zero(d.coeffs)) return false;
        return true;
    }

    [[nodiscard]] bool atoms_only() const {
        for (const auto& d : densities_)
            if (!poly_is_zero(d.coeffs)) return false;
        return true;
    }

    /// Total variation: sum of atom moduli plus the integral of the density
    /// modulus (adaptive quadrature, relative tolerance 1e-12).
    [[nodiscard]] double total_variation() const {
        double tv = 0.0;
        for (const auto& a : atoms_) tv += std::abs(a.weight);
        for (const auto& d : densities_) {
            const Poly& p = d.coeffs;
            tv += integrate_adaptive([&](double u) { return std::abs(poly_eval(p, u)); }, 0.0,
                                     d.to - d.from, 1e-13);
        }
        return tv;
    }

    /// Supremum of the support (ignoring zero weights and zero densities),
    /// or -infinity for the zero measure.
    [[nodiscard]] double support_max() const {
        double s = -std::numeric_limits<double>::infinity();
        for (const auto& a : atoms_)
            if (a.weight != Complex{0.0, 0.0}) s = std::max(s, a.at);
        for (const auto& d : densities_)
            if (!poly_is_zero(d.coeffs)) s = std::max(s, d.to);
        return s;
    }

private:
    void validate() const {
        if (!(h_ > 0.0)) throw ConfigError("ComplexMeasure: h must be positive");
        for (const auto& a : atoms_)
            if (a.at < -h_ - kTimeTol || a.at > kTimeTol)
                throw OutOfDomainError("ComplexMeasure: atom outside [-h, 0]");
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            for (std::size_t j = i + 1; j < atoms_.size(); ++j)
                if (std::abs(atoms_[i].at - atoms_[j].at) <= kTimeTol)
                    throw ConfigError("ComplexMeasure: atom locations must be distinct");
        for (const auto& d : densities_) {
            if (!(d.from < d.to))
                throw ConfigError("ComplexMeasure: density interval must have positive length");
            if (d.from < -h_ - kTimeTol || d.to > kTimeTol)
                throw OutOfDomainError("ComplexMeasure: density interval outside [-h, 0]");
        }
        auto sorted = densities_;
        std::sort(sorted.begin(), sorted.end(),
                  [](const DensityPiece& x, const DensityPiece& y) { return x.from < y.from; });
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
            if (sorted[i].to > sorted[i + 1].from + kTimeTol)
                throw ConfigError("ComplexMeasure: density intervals overlap");
    }

    double h_ = 1.0;
    std::vector<Atom> atoms_;
    std::vector<DensityPiece> densities_;
};

namespace detail {

/// Integral of density d against component k of v over the window
/// [t + d.from, t + d.to] of v's time axis: split at v's breakpoints, then
/// per sub-window closed-form polynomial products, or composite trapezoid on
/// the sample grid for sampled pieces.
inline Complex density_against(const DensityPiece& d, const PiecewiseFn& v, double t, int k) {
    const double wl = t + d.from, wr = t + d.to;
    std::vector<double> cuts{wl};
    for (double b : v.breakpoints())
        if (b > wl + kTimeTol && b < wr - kTimeTol) cuts.push_back(b);
    cuts.push_back(wr);

    Complex acc{0.0, 0.0};
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        const std::size_t j = v.piece_for(0.5 * (a + b));
        // Density re-expressed in the local variable w = x - a.
        const Poly dens = poly_shift(d.coeffs, a - (t + d.from));
        if (const auto* pp = std::get_if<PolyPiece>(&v.piece(j))) {
            const Poly f = poly_shift(pp->comps[std::size_t(k)], a - v.piece_left(j));
            acc += poly_integral(poly_mul(dens, f), 0.0, b - a);
        } else {
            const auto& sp = std::get<SampledPiece>(v.piece(j));
            std::vector<double> ts{a};
            for (double tm : sp.times)
                if (tm > a + kTimeTol && tm < b - kTimeTol) ts.push_back(tm);
            ts.push_back(b);
            Complex prev = poly_eval(dens, 0.0) * v.piece_interp(j, a, k);
            for (std::size_t i = 1; i < ts.size(); ++i) {
                const Complex cur = poly_eval(dens, ts[i] - a) * v.piece_interp(j, ts[i], k);
                acc += 0.5 * (ts[i] - ts[i - 1]) * (prev + cur);
                prev = cur;
            }
        }
    }
    return acc;
}

/// Integral of component k of v(t + .) against mu. Atom reads are pointwise
/// by default; quadrature code passes Side::Left / Side::Right to get the
/// one-sided limits a Lebesgue integral actually sees at its panel ends.
inline Complex integrate_shifted(const ComplexMeasure& mu, const PiecewiseFn& v, double t, int k,
                                 Side atom_side) {
    Complex acc{0.0, 0.0};
    for (const auto& a : mu.atoms())
        if (a.weight != Complex{0.0, 0.0}) acc += a.weight * v.eval_comp(t + a.at, k, atom_side);
    for (const auto& d : mu.densities())
        if (!poly_is_zero(d.coeffs)) acc += density_against(d, v, t, k);
    return acc;
}

} // namespace detail

/// Integral of a (component of a) piecewise function against mu. The
/// function's domain must cover [-h, 0].
[[nodiscard]] inline Complex integrate(const ComplexMeasure& mu, const PiecewiseFn& f,
                                       int component = 0) {
    if (component < 0 || component >= f.dim())
        throw DimensionError("integrate: component out of range");
    if (f.left() > -mu.horizon() + 1e-9 || f.right() < -1e-9)
        throw OutOfDomainError("integrate: function domain does not cover [-h, 0]");
    return detail::integrate_shifted(mu, f, 0.0, component, Side::Point);
}

// ---------------------------------------------------------------------------
// FunctionalMatrix
// ---------------------------------------------------------------------------

/// n x n grid of measures on a shared [-h, 0]; entry (j, k) weights input
/// component k in output component j. Realizes the functionals L and R of
/// the neutral equation and their extensions to discontinuous arguments.
class FunctionalMatrix {
public:
    FunctionalMatrix() = default;

    FunctionalMatrix(int n, double h)
        : n_(n), h_(h), entries_(std::size_t(n) * std::size_t(n), ComplexMeasure(h)) {
        if (n <= 0) throw DimensionError("FunctionalMatrix: dimension must be positive");
        if (!(h > 0.0)) throw ConfigError("FunctionalMatrix: h must be positive");
    }

    [[nodiscard]] int dim() const { return n_; }
    [[nodiscard]] double horizon() const { return h_; }

    [[nodiscard]] const ComplexMeasure& entry(int j, int k) const {
        return entries_[std::size_t(j) * n_ + k];
    }

    void set_entry(int j, int k, ComplexMeasure mu) {
        if (std::abs(mu.horizon() - h_) > kTimeTol)
            throw DomainMismatchError("FunctionalMatrix: entry horizon differs");
        entries_[std::size_t(j) * n_ + k] = std::move(mu);
    }

    [[nodiscard]] bool is_zero() const {
        for (const auto& e : entries_)
            if (!e.is_zero()) return false;
        return true;
    }

    [[nodiscard]] bool atoms_only() const {
        for (const auto& e : entries_)
            if (!e.atoms_only()) return false;
        return true;
    }

    /// Apply to initial data on [-h, 0]: component j = sum_k integral of
    /// phi_k against entry (j, k). For continuous phi this is the classical
    /// action; for piecewise phi it is the extension.
    [[nodiscard]] Vec apply(const PiecewiseFn& phi) const {
        if (phi.dim() != n_) throw DimensionError("apply: dimension mismatch");
        if (std::abs(phi.left() + h_) > 1e-9 || std::abs(phi.right()) > 1e-9)
            throw DomainMismatchError("apply: argument domain must be [-h, 0]");
        return apply_segment(phi, 0.0);
    }

    /// Apply to the segment v_t without materializing it: requires
    /// [t-h, t] inside v's domain. atom_side selects pointwise or one-sided
    /// reads at v's breakpoints (quadrature panels want the latter).
    [[nodiscard]] Vec apply_segment(const PiecewiseFn& v, double t,
                                    Side atom_side = Side::Point) const {
        if (v.dim() != n_) throw DimensionError("apply_segment: dimension mismatch");
        if (t - h_ < v.left() - 1e-9 || t > v.right() + 1e-9)
            throw OutOfDomainError("apply_segment: [t-h, t] not contained in domain");
        Vec out(std::size_t(n_), Complex{0.0, 0.0});
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k)
                out[std::size_t(j)] +=
                    detail::integrate_shifted(entry(j, k), v, t, k, atom_side);
        return out;
    }

    /// Exact operator norm for the max-norm on C^n and sup-norm on
    /// functions: max over rows of the summed total variations.
    [[nodiscard]] double operator_norm() const {
        double norm = 0.0;
        for (int j = 0; j < n_; ++j) {
            double row = 0.0;
            for (int k = 0; k < n_; ++k) row += entry(j, k).total_variation();
            norm = std::max(norm, row);
        }
        return norm;
    }

    /// The strict-delay margin Delta: the distance from the support to 0,
    /// clamped strictly below h. Throws if any support touches [0, ...),
    /// i.e. when no positive margin exists.
    [[nodiscard]] double strict_delay_margin() const {
        double s = -std::numeric_limits<double>::infinity();
        for (const auto& e : entries_) s = std::max(s, e.support_max());
        const double clamp = h_ * (1.0 - 1e-9);
        if (s == -std::numeric_limits<double>::infinity()) return clamp;
        if (s >= 0.0)
            throw NotStrictlyDelayedError("strict_delay_margin: support reaches 0");
        return std::min(-s, clamp);
    }

    /// Distinct positive delays tau = -location of the (nonzero) atoms, over
    /// all entries. These are the delays that propagate jumps.
    [[nodiscard]] std::vector<double> atom_delays() const {
        std::vector<double> ds;
        for (const auto& e : entries_)
            for (const auto& a : e.atoms())
                if (a.weight != Complex{0.0, 0.0} && -a.at > kTimeTol) ds.push_back(-a.at);
        std::sort(ds.begin(), ds.end());
        ds.erase(std::unique(ds.begin(), ds.end(),
                             [](double x, double y) { return std::abs(x - y) <= kTimeTol; }),
                 ds.end());
        return ds;
    }

private:
    int n_ = 0;
    double h_ = 1.0;
    std::vector<ComplexMeasure> entries_;
};

} // namespace ndde
