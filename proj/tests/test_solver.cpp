#include <catch2/catch_amalgamated.hpp>

#include "ndde/exact.hpp"
#include "ndde/solver.hpp"
#include "test_support.hpp"

#include <random>

using namespace ndde;
using Catch::Approx;

namespace {

FunctionalMatrix scalar_atom(double h, double at, double w) {
    FunctionalMatrix m(1, h);
    if (w != 0.0) m.set_entry(0, 0, ComplexMeasure(h, {Atom{at, Complex{w, 0.0}}}, {}));
    return m;
}

PiecewiseFn const1(double c) {
    return PiecewiseFn::constant(1, -1.0, 0.0, Vec{Complex{c, 0.0}});
}

/// Sampled scalar function from a callable.
PiecewiseFn sampled_fn(double a, double b, int nodes, const std::function<double(double)>& f) {
    SampledPiece sp;
    for (int i = 0; i <= nodes; ++i) {
        const double t = a + (b - a) * i / nodes;
        sp.times.push_back(t);
        sp.values.push_back(Complex{f(t), 0.0});
    }
    std::vector<Piece> ps;
    ps.emplace_back(std::move(sp));
    return PiecewiseFn(1, {a, b}, std::move(ps));
}

double max_dev_vs_exact(const Solution& sol, const exact::PiecewisePoly& ref, double t_lo,
                        double t_hi, int samples = 301) {
    double dev = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / samples;
        dev = std::max(dev, std::abs(sol.y.eval_comp(t, 0) - ref.at(t, 0)));
    }
    return dev;
}

const std::vector<exact::DelayTerm> kNeutralL{{1.0, {Complex{0.5, 0.0}}}};
const std::vector<exact::DelayTerm> kNeutralR{{1.0, {Complex{1.0, 0.0}}}};

} // namespace

TEST_CASE("propagate_breakpoints closes seeds under delays") {
    CHECK(propagate_breakpoints({0.0}, {1.0}, 3.5) == std::vector<double>{0.0, 1.0, 2.0, 3.0});
    CHECK(propagate_breakpoints({0.0}, {}, 3.0) == std::vector<double>{0.0});

    const auto got = propagate_breakpoints({-0.5, 0.0}, {1.0, 1.5}, 3.0);
    // brute-force closure: seed + k1*1.0 + k2*1.5 for all k1, k2 >= 0
    std::vector<double> brute;
    for (double s : {-0.5, 0.0})
        for (int k1 = 0; k1 <= 4; ++k1)
            for (int k2 = 0; k2 <= 3; ++k2) {
                const double t = s + k1 * 1.0 + k2 * 1.5;
                if (t <= 3.0 + 1e-12) brute.push_back(t);
            }
    std::sort(brute.begin(), brute.end());
    brute.erase(std::unique(brute.begin(), brute.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                brute.end());
    REQUIRE(got.size() == brute.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == Approx(brute[i]).margin(1e-9));
    CHECK(got == std::vector<double>{-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
}

TEST_CASE("zero functionals force a constant solution") {
    Problem p(FunctionalMatrix(1, 1.0), FunctionalMatrix(1, 1.0), const1(2.5), 3.0);
    const Solution sol = solve_homogeneous(p, {.grid_n = 128});
    for (double t : {-0.5, 0.0, 0.7, 1.9, 3.0})
        CHECK(sol.y.eval_comp(t, 0).real() == Approx(2.5).margin(1e-12));
    CHECK(sol.smoothed_max_jump <= 1e-12);
}

TEST_CASE("retarded oracle equivalence: x' = -x(t-1), phi == 1") {
    Problem p(FunctionalMatrix(1, 1.0), scalar_atom(1.0, -1.0, -1.0), const1(1.0), 3.0);
    const Solution sol = solve_homogeneous(p, {.grid_n = 512});
    CHECK(std::abs(sol.y.eval_comp(1.0, 0)) <= 1e-10);
    CHECK(sol.y.eval_comp(2.0, 0).real() == Approx(-0.5).margin(1e-8));

    const auto ref = exact::solve(1, {}, {{1.0, {Complex{-1.0, 0.0}}}},
                                  exact::PiecewisePoly::constant(1, -1.0, 0.0, {Complex{1.0, 0.0}}),
                                  nullptr, 3.0);
    CHECK(max_dev_vs_exact(sol, ref, 0.0, 3.0) <= 1e-5);
}

TEST_CASE("neutral oracle equivalence: d/dt(v - 0.5 v(t-1)) = v(t-1)") {
    Problem p(scalar_atom(1.0, -1.0, 0.5), scalar_atom(1.0, -1.0, 1.0), const1(1.0), 3.0);
    const Solution sol = solve_homogeneous(p, {.grid_n = 512});
    CHECK(sol.y.eval_comp(1.0, 0).real() == Approx(2.0).margin(1e-8));
    CHECK(sol.y.eval_comp(2.0, 0).real() == Approx(4.0).margin(1e-8));

    const auto ref = exact::solve(1, kNeutralL, kNeutralR,
                                  exact::PiecewisePoly::constant(1, -1.0, 0.0, {Complex{1.0, 0.0}}),
                                  nullptr, 3.0);
    CHECK(max_dev_vs_exact(sol, ref, 0.0, 3.0) <= 1e-5);
    CHECK(sol.c0_observed <= sol.c0_bound * sol.phi_sup + 1e-9);
    CHECK(sol.global_bound_margin <= 1.0 + 1e-9);
    const double contraction = sol.t0 * p.R.operator_norm();
    for (double r : sol.contraction_ratios) CHECK(r <= contraction + 0.05);
}

TEST_CASE("inhomogeneous: pure integration and a smooth forcing") {
    Problem p(FunctionalMatrix(1, 1.0), FunctionalMatrix(1, 1.0), const1(0.0), 3.0,
              PiecewiseFn::constant(1, 0.0, 3.0, Vec{Complex{1.0, 0.0}}));
    const Solution sol = solve_inhomogeneous(p, {.grid_n = 256});
    for (double t : {0.5, 1.0, 2.25, 3.0})
        CHECK(sol.y.eval_comp(t, 0).real() == Approx(t).margin(1e-10));

    const PiecewiseFn qcos = sampled_fn(0.0, 3.0, 8192, [](double t) { return std::cos(t); });
    Problem pc(FunctionalMatrix(1, 1.0), FunctionalMatrix(1, 1.0), const1(0.0), 3.0, qcos);
    const Solution sc = solve_inhomogeneous(pc, {.grid_n = 512});
    for (double t : {0.5, 1.5, 2.5, 3.0})
        CHECK(sc.y.eval_comp(t, 0).real() == Approx(std::sin(t)).margin(1e-5));

    CHECK_THROWS_AS(solve_inhomogeneous(Problem(FunctionalMatrix(1, 1.0),
                                                FunctionalMatrix(1, 1.0), const1(0.0), 1.0)),
                    ConfigError);
}

TEST_CASE("fundamental solution of the canonical neutral problem") {
    const FunctionalMatrix L = scalar_atom(1.0, -1.0, 0.5);
    const FunctionalMatrix R = scalar_atom(1.0, -1.0, 1.0);
    const FundamentalSolution X = fundamental_solution(L, R, 3.0, {.grid_n = 512});

    CHECK(X.eval(-0.5, 0, 0) == Complex{0.0, 0.0});
    CHECK(X.eval(0.0, 0, 0) == Complex{1.0, 0.0});
    CHECK(X.eval(0.5, 0, 0).real() == Approx(1.0).margin(1e-10));
    CHECK(X.eval(1.0, 0, 0).real() == Approx(1.5).margin(1e-8));
    CHECK(X.eval(1.5, 0, 0).real() == Approx(2.0).margin(1e-8));
    CHECK(X.eval(2.0, 0, 0, Side::Left).real() == Approx(2.5).margin(1e-8));

    REQUIRE(X.jump_ledger.size() == 3);
    CHECK(X.jump_ledger[0].first == Approx(1.0));
    CHECK(X.jump_ledger[0].second[0].real() == Approx(0.5).margin(1e-8));
    CHECK(X.jump_ledger[1].second[0].real() == Approx(0.25).margin(1e-8));

    // staircase: R = 0, L = a at delay 1
    const double a = 0.3;
    const FundamentalSolution S =
        fundamental_solution(scalar_atom(1.0, -1.0, a), FunctionalMatrix(1, 1.0), 3.0,
                             {.grid_n = 256});
    for (int k = 1; k <= 2; ++k)
        CHECK(S.jump_ledger[std::size_t(k - 1)].second[0].real() ==
              Approx(std::pow(a, k)).margin(1e-10));
    CHECK(S.eval(2.5, 0, 0).real() == Approx(1.0 + a + a * a).margin(1e-10));
}

TEST_CASE("parallel column evaluation returns identical results") {
    std::mt19937 g(901);
    const FunctionalMatrix L = ts::random_functional(g, 2, 1.0, -0.5, 0.4);
    const FunctionalMatrix R = ts::random_functional(g, 2, 1.0, -0.05, 0.8);
    const FundamentalSolution seq = fundamental_solution(L, R, 2.0, {.grid_n = 128}, false);
    const FundamentalSolution par = fundamental_solution(L, R, 2.0, {.grid_n = 128}, true);
    for (int c = 0; c < 2; ++c)
        for (double t : {0.3, 0.9, 1.4, 2.0})
            for (int r = 0; r < 2; ++r)
                CHECK(seq.eval(t, r, c) == par.eval(t, r, c));
}

TEST_CASE("smoothed part is continuous although the solution jumps") {
    const FunctionalMatrix L = scalar_atom(1.0, -1.0, 0.5);
    const FunctionalMatrix R = scalar_atom(1.0, -1.0, 1.0);
    Problem p(L, R, PiecewiseFn::fundamental_datum(1, 1.0, 0), 3.0);
    const Solution sol = solve_homogeneous(p, {.grid_n = 512});
    const SmoothedPart sp = smoothed_part(sol, p);
    CHECK(sp.max_jump <= 10 * sol.config.picard_tol);
    // w(t) = X(t) - 0.5 X(t-1): at t = 1 both one-sided values equal 1
    CHECK(sp.w.eval_comp(1.0, 0).real() == Approx(1.0).margin(1e-8));
    CHECK(sp.w.eval_comp(1.0, 0, Side::Left).real() == Approx(1.0).margin(1e-8));

    // L = 0: the smoothed part is the solution itself
    Problem pr(FunctionalMatrix(1, 1.0), scalar_atom(1.0, -1.0, -1.0), const1(1.0), 2.0);
    const Solution sr = solve_homogeneous(pr, {.grid_n = 256});
    const SmoothedPart wr = smoothed_part(sr, pr);
    for (double t : {0.25, 1.0, 1.75})
        CHECK(std::abs(wr.w.eval_comp(t, 0) - sr.y.eval_comp(t, 0)) <= 1e-12);
}

TEST_CASE("semigroup restart agrees with the shifted tail") {
    const FunctionalMatrix L = scalar_atom(1.0, -1.0, 0.5);
    const FunctionalMatrix R = scalar_atom(1.0, -1.0, 1.0);
    Problem p(L, R, const1(1.0), 3.0);
    const SolverConfig cfg{.grid_n = 512};
    const Solution sol = solve_homogeneous(p, cfg);

    const Solution again = semigroup_restart(sol, 0.0, p, cfg);
    CHECK(restart_deviation(sol, again, 0.0) <= 1e-12);

    const Solution tail = semigroup_restart(sol, 1.0, p, cfg);
    CHECK(tail.y.eval_comp(1.0, 0).real() == Approx(4.0).margin(1e-6));
    CHECK(restart_deviation(sol, tail, 1.0) <= 5e-6);

    Problem pc(FunctionalMatrix(1, 1.0), FunctionalMatrix(1, 1.0), const1(3.0), 2.0);
    const Solution csol = solve_homogeneous(pc, cfg);
    const Solution crst = semigroup_restart(csol, 0.5, pc, cfg);
    CHECK(restart_deviation(csol, crst, 0.5) <= 1e-12);
}

TEST_CASE("the scheme is linear in the datum") {
    std::mt19937 g(902);
    for (int trial = 0; trial < 3; ++trial) {
        const FunctionalMatrix L = ts::random_functional(g, 1, 1.0, -0.5, 0.45);
        FunctionalMatrix R = ts::random_functional(g, 1, 1.0, -0.05, 0.6);
        const SolverConfig cfg{.grid_n = 256, .picard_tol = 1e-12};

        // shared breakpoints keep the three runs on the identical grid; the
        // discrete scheme is then linear up to rounding and the Picard stop
        auto random_datum = [&] {
            std::vector<Piece> ps;
            for (int piece = 0; piece < 2; ++piece) {
                Poly c;
                for (int d = 0; d <= 2; ++d) c.push_back(ts::crand(g, 1.0));
                ps.emplace_back(PolyPiece{{std::move(c)}});
            }
            return PiecewiseFn(1, {-1.0, -0.55, 0.0}, std::move(ps));
        };
        const PiecewiseFn u = random_datum();
        const PiecewiseFn v = random_datum();
        const Complex a = ts::crand(g, 2.0), b = ts::crand(g, 2.0);

        const Solution su = solve_homogeneous(Problem(L, R, u, 2.0), cfg);
        const Solution sv = solve_homogeneous(Problem(L, R, v, 2.0), cfg);
        const Solution sc = solve_homogeneous(Problem(L, R, pw_lincomb(a, u, b, v), 2.0), cfg);

        double scale = std::max({su.y.sup_norm(), sv.y.sup_norm(), 1.0});
        for (int i = 0; i <= 200; ++i) {
            const double t = 2.0 * i / 200.0;
            const Complex want = a * su.y.eval_comp(t, 0) + b * sv.y.eval_comp(t, 0);
            CHECK(std::abs(sc.y.eval_comp(t, 0) - want) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("continuous dependence along mollified data") {
    const FunctionalMatrix L = scalar_atom(1.0, -1.0, 0.5);
    const FunctionalMatrix R = scalar_atom(1.0, -1.0, 1.0);
    const PiecewiseFn fd = PiecewiseFn::fundamental_datum(1, 1.0, 0);
    const SolverConfig cfg{.grid_n = 512};
    const Solution base = solve_homogeneous(Problem(L, R, fd, 2.0), cfg);

    std::vector<double> err05, err17;
    for (int m : {4, 16, 64, 256}) {
        const Solution sm =
            solve_homogeneous(Problem(L, R, approximate_by_continuous(fd, m), 2.0), cfg);
        err05.push_back(std::abs(sm.y.eval_comp(0.5, 0) - base.y.eval_comp(0.5, 0)));
        err17.push_back(std::abs(sm.y.eval_comp(1.7, 0) - base.y.eval_comp(1.7, 0)));
    }
    CHECK(err05[2] <= err05[1] + 1e-9);
    CHECK(err05[3] <= err05[2] + 1e-9);
    CHECK(err17[2] <= err17[1] + 1e-9);
    CHECK(err17[3] <= err17[2] + 1e-9);
    CHECK(err05[3] <= 1e-2);
    CHECK(err17[3] <= 1e-2);
    // the datum mollified at level m shifts y(1.7) by 1/(2m)
    CHECK(err17[1] == Approx(1.0 / 32).margin(1e-4));
}

TEST_CASE("error paths") {
    FunctionalMatrix bad(1, 1.0);
    bad.set_entry(0, 0, ComplexMeasure(1.0, {Atom{0.0, Complex{1.0, 0.0}}}, {}));
    CHECK_THROWS_AS(Problem(bad, FunctionalMatrix(1, 1.0), const1(1.0), 1.0),
                    NotStrictlyDelayedError);

    Problem p(scalar_atom(1.0, -1.0, 0.5), scalar_atom(1.0, -1.0, 1.0), const1(1.0), 2.0);
    CHECK_THROWS_AS(solve_homogeneous(p, SolverConfig{.t0 = 0.9}), ConfigError);
    CHECK_THROWS_AS(solve_homogeneous(p, SolverConfig{.picard_max_iter = 1}),
                    PicardDivergedError);

    // degenerate horizon: the restricted datum comes back
    Problem pd(scalar_atom(1.0, -1.0, 0.5), scalar_atom(1.0, -1.0, 1.0), const1(2.0), -0.25);
    const Solution sd = solve_homogeneous(pd);
    CHECK(sd.y.right() == Approx(-0.25));
    CHECK(sd.y.eval_comp(-0.5, 0).real() == Approx(2.0));
}
