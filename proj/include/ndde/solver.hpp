#pragma once

// Method-of-steps solver for the integrated neutral equation
//
//   y(t) - L y_t = phi(0) - L phi + int_(0,t) R y_s ds  (+ int_(0,t) q ds),
//
// with bounded piecewise initial data. The neutral functional L is strictly
// delayed with margin Delta, so on a step of length t0 <= Delta/2 the term
// L y_t only reads already-known history; the unknown enters through the
// integral term alone and a Picard iteration with contraction factor
// t0 * |R| < 1 resolves each step.
//
// Jumps of y are exactly the jumps of t -> L y_t (the smoothed part
// y - L y_t is continuous), so they live on the closure of the datum's jump
// set under the neutral atom delays. The quadrature grid splits there and at
// the R-shifted images, and every split panel uses one-sided limits: a
// Lebesgue integral never sees isolated point values.

#include "ndde/core.hpp"
#include "ndde/measure.hpp"
#include "ndde/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <utility>

namespace ndde {

struct Problem {
    FunctionalMatrix L;
    FunctionalMatrix R;
    PiecewiseFn phi;
    std::optional<PiecewiseFn> q;
    double T = 0.0;
    double delta = 0.0;   // strict-delay margin of L
    double delta_e = 0.0; // working margin delta / 2

    Problem(FunctionalMatrix L_, FunctionalMatrix R_, PiecewiseFn phi_, double T_,
            std::optional<PiecewiseFn> q_ = {})
        : L(std::move(L_)), R(std::move(R_)), phi(std::move(phi_)), q(std::move(q_)), T(T_) {
        if (L.dim() != R.dim() || L.dim() != phi.dim())
            throw DimensionError("Problem: L, R and phi dimensions differ");
        if (std::abs(L.horizon() - R.horizon()) > kTimeTol)
            throw DomainMismatchError("Problem: L and R horizons differ");
        if (std::abs(phi.left() + L.horizon()) > 1e-9 || std::abs(phi.right()) > 1e-9)
            throw DomainMismatchError("Problem: phi domain must be [-h, 0]");
        delta = L.strict_delay_margin();
        delta_e = 0.5 * delta;
        if (q) {
            if (q->dim() != L.dim()) throw DimensionError("Problem: q dimension differs");
            if (q->left() > 1e-9 || q->right() < T - 1e-9)
                throw DomainMismatchError("Problem: q must cover [0, T]");
            const double scale = std::max(1.0, q->sup_norm());
            if (!q->jumps(1e-9 * scale).empty())
                throw ConfigError("Problem: q must be continuous");
        }
    }

    [[nodiscard]] int n() const { return L.dim(); }
    [[nodiscard]] double h() const { return L.horizon(); }
};

struct SolverConfig {
    int grid_n = 512;        // grid points per unit time
    double t0 = 0.0;         // step length; 0 selects min(delta_e, rho/|R|)
    double rho = 0.5;        // target contraction factor for the default t0
    double picard_tol = 1e-10;
    int picard_max_iter = 200;
};

struct Solution {
    PiecewiseFn y; // on [-h, T]
    std::vector<double> breakpoints_used;
    std::vector<int> picard_iters;            // per step
    std::vector<double> contraction_ratios;   // observed per step (max ratio)
    double t0 = 0.0;
    double delta = 0.0;
    double delta_e = 0.0;
    double phi_sup = 0.0;
    double c0_bound = 0.0;    // (1+|L|+t0|R|(1+2|L|)) / (1-t0|R|)
    double c0_observed = 0.0; // sup |y - L y_t| over the first step
    double global_bound_margin = 0.0; // max over grid of sup|y| / (c(t)|phi|)
    double smoothed_max_jump = 0.0;
    SolverConfig config;
};

/// Smallest superset of the seeds closed under b -> b + tau for every atom
/// delay, clipped to (-inf, T]. Densities smooth, they propagate nothing.
[[nodiscard]] inline std::vector<double> propagate_breakpoints(const std::vector<double>& seed,
                                                               const std::vector<double>& delays,
                                                               double T) {
    std::vector<double> out;
    auto known = [&](double t) {
        return std::any_of(out.begin(), out.end(),
                           [&](double s) { return std::abs(s - t) <= 1e-9; });
    };
    std::vector<double> queue = seed;
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

namespace detail {

struct NodeGrid {
    std::vector<double> times;
    std::vector<bool> is_jump;  // lies on the propagated jump set
    std::vector<bool> is_split; // integrand may be discontinuous here
};

/// Merge candidate times within tolerance; breakpoint times win ties.
inline NodeGrid build_grid(const Problem& p, const SolverConfig& cfg, double t0,
                           const std::vector<double>& bfull) {
    struct Cand {
        double t;
        int prio; // 0 = jump breakpoint, 1 = split point, 2 = plain node
    };
    std::vector<Cand> cand;
    const double T = p.T;
    for (double b : bfull)
        if (b >= -kTimeTol && b <= T + kTimeTol) cand.push_back({std::max(b, 0.0), 0});
    const std::vector<double> r_delays = p.R.atom_delays();
    for (double b : bfull)
        for (double s : r_delays)
            if (b + s >= -kTimeTol && b + s <= T + kTimeTol) cand.push_back({b + s, 1});
    if (p.q)
        for (double b : p.q->breakpoints())
            if (b >= -kTimeTol && b <= T + kTimeTol) cand.push_back({b, 1});
    const long grid_count = long(std::ceil(T * cfg.grid_n - 1e-9));
    for (long j = 0; j <= grid_count; ++j) {
        const double t = double(j) / cfg.grid_n;
        if (t <= T + kTimeTol) cand.push_back({std::min(t, T), 2});
    }
    for (long k = 1; k * t0 < T - kTimeTol; ++k) cand.push_back({k * t0, 2});
    cand.push_back({0.0, 2});
    cand.push_back({T, 2});

    std::sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) { return a.t < b.t; });
    NodeGrid g;
    std::size_t i = 0;
    while (i < cand.size()) {
        std::size_t j = i;
        Cand best = cand[i];
        while (j + 1 < cand.size() && cand[j + 1].t - cand[i].t <= kTimeTol) {
            ++j;
            if (cand[j].prio < best.prio) best = cand[j];
        }
        g.times.push_back(best.t);
        g.is_jump.push_back(best.prio == 0);
        bool split = false;
        for (std::size_t k = i; k <= j; ++k) split = split || cand[k].prio <= 1;
        g.is_split.push_back(split);
        i = j + 1;
    }
    return g;
}

} // namespace detail

namespace detail {

inline Solution solve_impl(const Problem& p, const SolverConfig& cfg, bool with_q) {
    const int n = p.n();
    const double h = p.h();
    const double T = p.T;
    if (with_q && !p.q) throw ConfigError("solve_inhomogeneous: problem carries no forcing q");

    const double normR = p.R.operator_norm();
    const double normL = p.L.operator_norm();
    double t0 = cfg.t0;
    if (t0 <= 0.0)
        t0 = normR > 0.0 ? std::min(p.delta_e, cfg.rho / normR) : p.delta_e;
    if (t0 > p.delta_e + 1e-9)
        throw ConfigError("solver: step t0 exceeds delta_e");
    if (t0 * normR >= 1.0 - 1e-9)
        throw ConfigError("solver: t0 * |R| must stay below 1");

    Solution sol{.y = p.phi,
                 .breakpoints_used = {},
                 .picard_iters = {},
                 .contraction_ratios = {},
                 .t0 = t0,
                 .delta = p.delta,
                 .delta_e = p.delta_e,
                 .phi_sup = p.phi.sup_norm(),
                 .c0_bound = 0.0,
                 .c0_observed = 0.0,
                 .global_bound_margin = 0.0,
                 .smoothed_max_jump = 0.0,
                 .config = cfg};
    sol.c0_bound = (1.0 + normL + t0 * normR * (1.0 + 2.0 * normL)) / (1.0 - t0 * normR);

    if (T <= kTimeTol) {
        if (T < -h + 1e-9) throw ConfigError("solver: T below -h");
        sol.y = T < -kTimeTol ? p.phi.restrict(-h, T) : p.phi;
        sol.breakpoints_used = sol.y.breakpoints();
        return sol;
    }

    // Propagated jump set: the datum's interior breakpoints and 0, closed
    // under the neutral atom delays.
    std::vector<double> seeds{0.0};
    for (double b : p.phi.breakpoints())
        if (b > -h + kTimeTol && b < -kTimeTol) seeds.push_back(b);
    const std::vector<double> bfull = propagate_breakpoints(seeds, p.L.atom_delays(), T);
    sol.breakpoints_used = bfull;

    const NodeGrid grid = build_grid(p, cfg, t0, bfull);
    const std::vector<double>& tn = grid.times;
    const std::size_t N = tn.size();
    const std::size_t vn = std::size_t(n);

    std::vector<Complex> val(N * vn), leftv(N * vn), rightv(N * vn);
    std::vector<Complex> lyv(N * vn), lyl(N * vn), lyr(N * vn);
    std::vector<Complex> ryr(N * vn), ryl(N * vn);
    std::vector<Complex> qq(N * vn, Complex{0.0, 0.0}); // int_0^t q ds

    if (with_q) {
        const PiecewiseFn& qf = *p.q;
        Vec prev_r = qf.eval_side(tn[0], Side::Right);
        for (std::size_t i = 1; i < N; ++i) {
            const Vec cl = qf.eval_side(tn[i], Side::Left);
            const double dt = tn[i] - tn[i - 1];
            for (int k = 0; k < n; ++k)
                qq[i * vn + k] = qq[(i - 1) * vn + k] +
                                 0.5 * dt * (prev_r[std::size_t(k)] + cl[std::size_t(k)]);
            prev_r = qf.eval_side(tn[i], Side::Right);
        }
    }

    // K = phi(0) - L phi.
    const Vec phi0 = p.phi.eval(0.0);
    const Vec lphi = p.L.apply(p.phi);
    Vec K(vn);
    for (int k = 0; k < n; ++k) K[std::size_t(k)] = phi0[std::size_t(k)] - lphi[std::size_t(k)];

    for (int k = 0; k < n; ++k) {
        val[std::size_t(k)] = phi0[std::size_t(k)];
        leftv[std::size_t(k)] = p.phi.eval_comp(0.0, k, Side::Left);
    }

    Vec q_acc(vn, Complex{0.0, 0.0}); // committed int_0^a R y_s ds

    // Trial trajectory: known history plus the current step's candidate
    // pieces; candidate samples are rewritten each Picard sweep.
    PiecewiseFn trial = p.phi;

    std::size_t ia = 0;
    double a = 0.0;
    while (a < T - kTimeTol) {
        const double b_target = std::min(a + t0, T);
        std::size_t ib = std::size_t(std::upper_bound(tn.begin(), tn.end(), b_target + 1e-9) -
                                     tn.begin()) - 1;
        if (ib <= ia) ib = ia + 1;
        const double b = tn[ib];

        // Candidate piece boundaries: a, the jump nodes strictly inside, b.
        std::vector<std::size_t> bounds{ia};
        for (std::size_t i = ia + 1; i < ib; ++i)
            if (grid.is_jump[i]) bounds.push_back(i);
        bounds.push_back(ib);

        // Right limit at the step start (reads only committed history).
        {
            const Vec lr = p.L.apply_segment(trial, a, Side::Right);
            for (int k = 0; k < n; ++k)
                rightv[ia * vn + k] = lr[std::size_t(k)] + K[std::size_t(k)] +
                                      q_acc[std::size_t(k)] + qq[ia * vn + k];
        }

        auto rebuild_trial = [&]() {
            std::vector<double> nb;
            std::vector<Piece> np;
            std::vector<Complex> nv;
            for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
                nb.push_back(tn[bounds[bi]]);
                for (int k = 0; k < n; ++k) nv.push_back(val[bounds[bi] * vn + k]);
            }
            for (std::size_t bi = 0; bi + 1 < bounds.size(); ++bi) {
                SampledPiece sp;
                for (std::size_t i = bounds[bi]; i <= bounds[bi + 1]; ++i) {
                    sp.times.push_back(tn[i]);
                    const Complex* src = i == bounds[bi] ? &rightv[i * vn]
                                        : i == bounds[bi + 1] ? &leftv[i * vn]
                                                              : &val[i * vn];
                    for (int k = 0; k < n; ++k) sp.values.push_back(src[k]);
                }
                np.emplace_back(std::move(sp));
            }
            PiecewiseFn cand(n, std::move(nb), std::move(np), std::move(nv));
            return concat(trial.right() > a ? trial.restrict(-h, a) : trial, cand);
        };

        // Constant continuation as the initial iterate.
        for (std::size_t i = ia + 1; i <= ib; ++i)
            for (int k = 0; k < n; ++k) {
                val[i * vn + k] = val[ia * vn + k];
                leftv[i * vn + k] = val[ia * vn + k];
                rightv[i * vn + k] = val[ia * vn + k];
            }
        PiecewiseFn work = rebuild_trial();

        // The neutral term reads history at most t - delta <= a, so it is
        // fixed for the whole step.
        for (std::size_t i = ia + 1; i <= ib; ++i) {
            const Vec lv = p.L.apply_segment(work, tn[i], Side::Point);
            for (int k = 0; k < n; ++k) lyv[i * vn + k] = lv[std::size_t(k)];
            if (grid.is_jump[i]) {
                const Vec ll = p.L.apply_segment(work, tn[i], Side::Left);
                const Vec lr = p.L.apply_segment(work, tn[i], Side::Right);
                for (int k = 0; k < n; ++k) {
                    lyl[i * vn + k] = ll[std::size_t(k)];
                    lyr[i * vn + k] = lr[std::size_t(k)];
                }
            } else {
                for (int k = 0; k < n; ++k) {
                    lyl[i * vn + k] = lv[std::size_t(k)];
                    lyr[i * vn + k] = lv[std::size_t(k)];
                }
            }
        }

        int iter = 0;
        double prev_delta = -1.0;
        double max_ratio = 0.0;
        while (true) {
            ++iter;
            if (iter > cfg.picard_max_iter)
                throw PicardDivergedError(
                    "solver: Picard iteration exceeded its budget at step starting t=" +
                    std::to_string(a) + " (contraction " + std::to_string(t0 * normR) + ")");

            for (std::size_t i = ia; i <= ib; ++i) {
                if (grid.is_split[i] || i == ia || i == ib) {
                    const Vec rr = p.R.apply_segment(work, tn[i], Side::Right);
                    const Vec rl = p.R.apply_segment(work, tn[i], Side::Left);
                    for (int k = 0; k < n; ++k) {
                        ryr[i * vn + k] = rr[std::size_t(k)];
                        ryl[i * vn + k] = rl[std::size_t(k)];
                    }
                } else {
                    const Vec rv = p.R.apply_segment(work, tn[i], Side::Point);
                    for (int k = 0; k < n; ++k) {
                        ryr[i * vn + k] = rv[std::size_t(k)];
                        ryl[i * vn + k] = rv[std::size_t(k)];
                    }
                }
            }

            double delta = 0.0;
            Vec qs(vn, Complex{0.0, 0.0});
            for (std::size_t i = ia + 1; i <= ib; ++i) {
                const double dt = tn[i] - tn[i - 1];
                for (int k = 0; k < n; ++k)
                    qs[std::size_t(k)] +=
                        0.5 * dt * (ryr[(i - 1) * vn + k] + ryl[i * vn + k]);
                for (int k = 0; k < n; ++k) {
                    const Complex cont = K[std::size_t(k)] + q_acc[std::size_t(k)] +
                                         qq[i * vn + k] + qs[std::size_t(k)];
                    const Complex nv = lyv[i * vn + k] + cont;
                    delta = std::max(delta, std::abs(nv - val[i * vn + k]));
                    val[i * vn + k] = nv;
                    leftv[i * vn + k] = lyl[i * vn + k] + cont;
                    rightv[i * vn + k] = lyr[i * vn + k] + cont;
                }
            }
            work = rebuild_trial();

            if (prev_delta > 10.0 * cfg.picard_tol && delta > 0.0)
                max_ratio = std::max(max_ratio, delta / prev_delta);
            if (delta <= cfg.picard_tol) break;
            prev_delta = delta;
        }
        sol.picard_iters.push_back(iter);
        sol.contraction_ratios.push_back(max_ratio);

        // Commit the step.
        {
            Vec qs(vn, Complex{0.0, 0.0});
            for (std::size_t i = ia + 1; i <= ib; ++i) {
                const double dt = tn[i] - tn[i - 1];
                for (int k = 0; k < n; ++k)
                    qs[std::size_t(k)] +=
                        0.5 * dt * (ryr[(i - 1) * vn + k] + ryl[i * vn + k]);
            }
            for (int k = 0; k < n; ++k) q_acc[std::size_t(k)] += qs[std::size_t(k)];
        }
        trial = std::move(work);
        ia = ib;
        a = b;
    }

    // First-step and global a-priori bounds (observed values recorded here,
    // asserted by the check suites).
    {
        const double first_end = std::min(t0, T) + 1e-9;
        double c0_obs = 0.0;
        for (std::size_t i = 0; i < N && tn[i] <= first_end; ++i) {
            double w = 0.0;
            if (i == 0) {
                w = inf_norm(K);
            } else {
                for (int k = 0; k < n; ++k)
                    w = std::max(w, std::abs(val[i * vn + k] - lyv[i * vn + k]));
            }
            c0_obs = std::max(c0_obs, w);
        }
        sol.c0_observed = c0_obs;

        const double c1 = sol.c0_bound + normL;
        double run_sup = sol.phi_sup;
        double worst = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            for (int k = 0; k < n; ++k) run_sup = std::max(run_sup, std::abs(val[i * vn + k]));
            const int steps = int(std::ceil(tn[i] / t0 - 1e-9));
            double ct = 1.0;
            double pw = 1.0;
            for (int s = 0; s < steps; ++s) {
                pw *= c1;
                ct += pw;
            }
            if (sol.phi_sup > 0.0)
                worst = std::max(worst, run_sup / (ct * sol.phi_sup));
            else if (run_sup > 0.0)
                worst = std::numeric_limits<double>::infinity();
        }
        sol.global_bound_margin = worst;
    }

    // Final assembly: pieces delimited by the propagated jump set only.
    {
        std::vector<std::size_t> bounds{0};
        for (std::size_t i = 1; i + 1 < N; ++i)
            if (grid.is_jump[i]) bounds.push_back(i);
        bounds.push_back(N - 1);

        std::vector<double> nb;
        std::vector<Piece> np;
        std::vector<Complex> nv;
        for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
            nb.push_back(tn[bounds[bi]]);
            for (int k = 0; k < n; ++k) nv.push_back(val[bounds[bi] * vn + k]);
        }
        for (std::size_t bi = 0; bi + 1 < bounds.size(); ++bi) {
            SampledPiece sp;
            for (std::size_t i = bounds[bi]; i <= bounds[bi + 1]; ++i) {
                sp.times.push_back(tn[i]);
                const Complex* src = i == bounds[bi] ? &rightv[i * vn]
                                    : i == bounds[bi + 1] ? &leftv[i * vn]
                                                          : &val[i * vn];
                for (int k = 0; k < n; ++k) sp.values.push_back(src[k]);
            }
            np.emplace_back(std::move(sp));
        }
        PiecewiseFn tail(n, std::move(nb), std::move(np), std::move(nv));
        sol.y = concat(p.phi, tail);
    }

    // Observed smoothed-part jumps (should vanish up to iteration residue).
    {
        double mj = 0.0;
        for (std::size_t i = 1; i + 1 < N; ++i) {
            if (!grid.is_jump[i]) continue;
            for (int k = 0; k < n; ++k) {
                const Complex wv = val[i * vn + k] - lyv[i * vn + k];
                const Complex wl = leftv[i * vn + k] - lyl[i * vn + k];
                mj = std::max(mj, std::abs(wv - wl));
            }
        }
        sol.smoothed_max_jump = mj;
    }

    return sol;
}

} // namespace detail

/// Solve the homogeneous integrated equation on [0, T] with datum phi.
/// Any forcing attached to the problem is ignored here.
[[nodiscard]] inline Solution solve_homogeneous(const Problem& p, const SolverConfig& cfg = {}) {
    return detail::solve_impl(p, cfg, /*with_q=*/false);
}

/// Same stepping with the running integral of q added; with phi = 0 this is
/// the direct computation of the particular solution.
[[nodiscard]] inline Solution solve_inhomogeneous(const Problem& p,
                                                  const SolverConfig& cfg = {}) {
    return detail::solve_impl(p, cfg, /*with_q=*/true);
}

struct FundamentalSolution {
    int n = 0;
    double h = 0.0;
    double T = 0.0;
    std::vector<Solution> columns;
    /// (time, jump matrix) with entry [row * n + col] = jump of component
    /// `row` of column `col`; times are the propagated images of 0.
    std::vector<std::pair<double, std::vector<Complex>>> jump_ledger;

    [[nodiscard]] Complex eval(double t, int row, int col, Side side = Side::Point) const {
        return columns[std::size_t(col)].y.eval_comp(t, row, side);
    }

    [[nodiscard]] double sup_abs(double t) const {
        double m = 0.0;
        for (int c = 0; c < n; ++c)
            m = std::max(m, inf_norm(columns[std::size_t(c)].y.eval(t)));
        return m;
    }
};

/// The n columns of Def-style fundamental data (zero history, unit vector at
/// 0) solved independently; columns can run in parallel, results identical.
[[nodiscard]] inline FundamentalSolution fundamental_solution(const FunctionalMatrix& L,
                                                              const FunctionalMatrix& R, double T,
                                                              const SolverConfig& cfg = {},
                                                              bool parallel_columns = false) {
    const int n = L.dim();
    const double h = L.horizon();
    FundamentalSolution X{.n = n, .h = h, .T = T, .columns = {}, .jump_ledger = {}};

    auto solve_col = [&](int j) {
        Problem p(L, R, PiecewiseFn::fundamental_datum(n, h, j), T);
        return solve_homogeneous(p, cfg);
    };

    if (parallel_columns && n > 1) {
        std::vector<std::future<Solution>> futs;
        futs.reserve(std::size_t(n));
        for (int j = 0; j < n; ++j)
            futs.push_back(std::async(std::launch::async, solve_col, j));
        for (auto& f : futs) X.columns.push_back(f.get());
    } else {
        for (int j = 0; j < n; ++j) X.columns.push_back(solve_col(j));
    }

    const std::vector<double> prop = propagate_breakpoints({0.0}, L.atom_delays(), T);
    for (double b : prop) {
        if (b <= kTimeTol) continue;
        std::vector<Complex> jump(std::size_t(n) * std::size_t(n));
        for (int col = 0; col < n; ++col)
            for (int row = 0; row < n; ++row)
                jump[std::size_t(row) * n + col] =
                    X.eval(b, row, col, Side::Point) - X.eval(b, row, col, Side::Left);
        X.jump_ledger.emplace_back(b, std::move(jump));
    }
    return X;
}

struct SmoothedPart {
    PiecewiseFn w;
    double max_jump = 0.0;
};

/// Recompute t -> y(t) - L y_t on [0, T] from a finished solution and report
/// the worst discontinuity across breakpoints; this is the continuity
/// statement the neutral structure guarantees.
[[nodiscard]] inline SmoothedPart smoothed_part(const Solution& sol, const Problem& p) {
    const int n = p.n();
    const PiecewiseFn& y = sol.y;
    const double T = y.right();

    std::vector<double> nb;
    std::vector<Piece> np;
    std::vector<Complex> nv;
    double max_jump = 0.0;

    if (!(T > kTimeTol)) throw OutOfDomainError("smoothed_part: solution has no [0, T] part");
    for (std::size_t j = y.piece_for(0.0); j < y.piece_count(); ++j) {
        if (y.piece_right(j) <= kTimeTol) continue;
        const double l = y.piece_left(j), r = y.piece_right(j);
        std::vector<double> ts;
        if (const auto* sp = std::get_if<SampledPiece>(&y.piece(j))) {
            ts = sp->times;
        } else {
            const int m = 64;
            for (int i = 0; i <= m; ++i) ts.push_back(l + (r - l) * i / m);
        }
        SampledPiece wp;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const Side side =
                i == 0 ? Side::Right : (i + 1 == ts.size() ? Side::Left : Side::Point);
            const Vec yv = y.eval_side(ts[i], side);
            const Vec lv = p.L.apply_segment(y, ts[i], side);
            wp.times.push_back(ts[i]);
            for (int k = 0; k < n; ++k)
                wp.values.push_back(yv[std::size_t(k)] - lv[std::size_t(k)]);
        }
        if (nb.empty()) {
            nb.push_back(l);
            const Vec yv = y.eval_side(l, Side::Point);
            const Vec lv = p.L.apply_segment(y, l, Side::Point);
            for (int k = 0; k < n; ++k) nv.push_back(yv[std::size_t(k)] - lv[std::size_t(k)]);
        }
        nb.push_back(r);
        const Vec yv = y.eval_side(r, Side::Point);
        const Vec lv = p.L.apply_segment(y, r, Side::Point);
        for (int k = 0; k < n; ++k) nv.push_back(yv[std::size_t(k)] - lv[std::size_t(k)]);
        np.emplace_back(std::move(wp));
    }

    PiecewiseFn w(n, std::move(nb), std::move(np), std::move(nv));
    for (std::size_t i = 1; i < w.breakpoints().size(); ++i) {
        const double t = w.breakpoints()[i];
        for (int k = 0; k < n; ++k) {
            const Complex pv = w.eval_comp(t, k, Side::Point);
            max_jump = std::max(max_jump, std::abs(pv - w.eval_comp(t, k, Side::Left)));
            if (i + 1 < w.breakpoints().size())
                max_jump = std::max(max_jump, std::abs(w.eval_comp(t, k, Side::Right) - pv));
        }
    }
    return SmoothedPart{std::move(w), max_jump};
}

/// Re-solve from the segment at t_r; by uniqueness the result must agree
/// with the shifted tail of the original solution.
[[nodiscard]] inline Solution semigroup_restart(const Solution& sol, double t_r,
                                                const Problem& p, const SolverConfig& cfg = {}) {
    if (t_r < -kTimeTol || t_r >= p.T - kTimeTol)
        throw OutOfDomainError("semigroup_restart: t_r must lie in [0, T)");
    PiecewiseFn datum = sol.y.segment(t_r, p.h());
    Problem shifted(p.L, p.R, std::move(datum), p.T - t_r);
    return solve_homogeneous(shifted, cfg);
}

/// Max deviation between the restarted run and the shifted tail, over the
/// restarted solution's own sample grid.
[[nodiscard]] inline double restart_deviation(const Solution& original,
                                              const Solution& restarted, double t_r) {
    double dev = 0.0;
    const PiecewiseFn& yr = restarted.y;
    for (std::size_t j = 0; j < yr.piece_count(); ++j) {
        if (yr.piece_right(j) <= kTimeTol) continue;
        std::vector<double> ts;
        if (const auto* sp = std::get_if<SampledPiece>(&yr.piece(j))) ts = sp->times;
        else ts = {yr.piece_left(j), yr.piece_right(j)};
        for (double s : ts) {
            if (s < 0.0) continue;
            const Vec a = yr.eval(s);
            const Vec b = original.y.eval(std::min(t_r + s, original.y.right()));
            dev = std::max(dev, inf_norm(a - b));
        }
    }
    return dev;
}

} // namespace ndde
