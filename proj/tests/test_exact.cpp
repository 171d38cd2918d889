#include <catch2/catch_amalgamated.hpp>

#include "ndde/exact.hpp"

#include <cmath>
#include <functional>

using namespace ndde;
using namespace ndde::exact;
using Catch::Approx;

namespace {

Matrix m1(double x) { return Matrix{Complex{x, 0.0}}; }

/// Crude forward-Euler march of the integrated equation
///   y(t) = sum A y(t - tau) + C + G(t),  G' = sum B y(t - sigma) + q(t),
/// used as an independent sanity check of the closed-form stepper.
std::vector<double> euler_march(double a, double b, double phi_const, double T, double dt) {
    const auto lookup = [&](const std::vector<double>& y, double t) {
        if (t <= 0.0) return phi_const;
        return y[std::size_t(std::llround(t / dt))];
    };
    const std::size_t N = std::size_t(std::llround(T / dt));
    std::vector<double> y(N + 1, 0.0);
    const double C = phi_const - a * phi_const;
    double G = 0.0;
    y[0] = phi_const;
    for (std::size_t i = 1; i <= N; ++i) {
        const double t = double(i) * dt;
        G += dt * b * lookup(y, (t - dt) - 1.0);
        y[i] = a * lookup(y, t - 1.0) + C + G;
    }
    return y;
}

} // namespace

TEST_CASE("retarded equation x' = -x(t-1), phi == 1") {
    const PiecewisePoly phi = PiecewisePoly::constant(1, -1.0, 0.0, {Complex{1.0, 0.0}});
    const PiecewisePoly v = solve(1, {}, {DelayTerm{1.0, m1(-1.0)}}, phi, nullptr, 3.0);

    CHECK(v.at(1.0, 0).real() == Approx(0.0).margin(1e-14));
    CHECK(v.at(2.0, 0).real() == Approx(-0.5).margin(1e-14));
    // piece on [1, 2] is t^2/2 - 2 t + 3/2
    for (double t : {1.25, 1.5, 1.75})
        CHECK(v.at(t, 0).real() == Approx(t * t / 2 - 2 * t + 1.5).margin(1e-13));

    const auto euler = euler_march(0.0, -1.0, 1.0, 3.0, 1e-5);
    for (double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
        CHECK(std::abs(euler[std::size_t(std::llround(t / 1e-5))] - v.at(t, 0).real()) <= 1e-3);
}

TEST_CASE("neutral equation d/dt(v - 0.5 v(t-1)) = v(t-1), phi == 1") {
    const PiecewisePoly phi = PiecewisePoly::constant(1, -1.0, 0.0, {Complex{1.0, 0.0}});
    const PiecewisePoly v =
        solve(1, {DelayTerm{1.0, m1(0.5)}}, {DelayTerm{1.0, m1(1.0)}}, phi, nullptr, 3.0);

    CHECK(v.at(1.0, 0).real() == Approx(2.0).margin(1e-14));
    CHECK(v.at(2.0, 0).real() == Approx(4.0).margin(1e-13));
    for (double t : {0.25, 0.5, 0.75})
        CHECK(v.at(t, 0).real() == Approx(1.0 + t).margin(1e-14));
    for (double t : {1.25, 1.5, 1.75}) {
        const double s = t - 1.0;
        CHECK(v.at(t, 0).real() == Approx(2.0 + 1.5 * s + s * s / 2).margin(1e-13));
    }

    const auto euler = euler_march(0.5, 1.0, 1.0, 3.0, 1e-5);
    for (double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
        CHECK(std::abs(euler[std::size_t(std::llround(t / 1e-5))] - v.at(t, 0).real()) <= 1e-3);
}

TEST_CASE("pure integration: L = 0, R = 0, q == 1, phi == 0") {
    const PiecewisePoly phi = PiecewisePoly::constant(1, -1.0, 0.0, {Complex{0.0, 0.0}});
    const PiecewisePoly q = PiecewisePoly::constant(1, 0.0, 2.0, {Complex{1.0, 0.0}});
    const PiecewisePoly v = solve(1, {}, {}, phi, &q, 2.0);
    for (double t : {0.3, 1.0, 1.7, 2.0})
        CHECK(v.at(t, 0).real() == Approx(t).margin(1e-14));
}

TEST_CASE("fundamental column of the canonical neutral problem") {
    const auto cols = fundamental(1, 1.0, {DelayTerm{1.0, m1(0.5)}}, {DelayTerm{1.0, m1(1.0)}},
                                  3.0);
    const PiecewisePoly& X = cols[0];
    CHECK(X.at(0.0, 0).real() == 1.0);
    CHECK(X.at(0.5, 0).real() == Approx(1.0).margin(1e-14));
    CHECK(X.left_limit(1.0, 0).real() == Approx(1.0).margin(1e-14));
    CHECK(X.at(1.0, 0).real() == Approx(1.5).margin(1e-14));
    CHECK(X.at(1.5, 0).real() == Approx(2.0).margin(1e-14));
    CHECK(X.left_limit(2.0, 0).real() == Approx(2.5).margin(1e-14));
    CHECK(X.jump_at(1.0)[0].real() == Approx(0.5).margin(1e-14));
    CHECK(X.jump_at(2.0)[0].real() == Approx(0.25).margin(1e-14));
}

TEST_CASE("neutral staircase: R = 0, L = a at delay 1") {
    const double a = 0.3;
    const auto cols = fundamental(1, 1.0, {DelayTerm{1.0, m1(a)}}, {}, 4.0);
    const PiecewisePoly& X = cols[0];
    double expect = 1.0;
    for (int k = 0; k <= 3; ++k) {
        CHECK(X.at(k + 0.5, 0).real() == Approx(expect).margin(1e-13));
        if (k >= 1) CHECK(X.jump_at(double(k))[0].real() == Approx(std::pow(a, k)).margin(1e-13));
        expect += std::pow(a, k + 1);
    }
}

TEST_CASE("retarded fundamental solution is continuous past 0") {
    const auto cols = fundamental(1, 1.0, {}, {DelayTerm{1.0, m1(-1.0)}}, 3.0);
    const PiecewisePoly& X = cols[0];
    for (std::size_t i = 1; i < X.breaks.size(); ++i) {
        if (X.breaks[i] <= 1e-9) continue;
        CHECK(inf_norm(X.jump_at(X.breaks[i])) <= 1e-14);
    }
}

TEST_CASE("smoothed part of the stepper is continuous at breakpoints") {
    const double a = 0.5;
    const PiecewisePoly phi = PiecewisePoly::fundamental_datum(1, 1.0, 0);
    const PiecewisePoly v =
        solve(1, {DelayTerm{1.0, m1(a)}}, {DelayTerm{1.0, m1(1.0)}}, phi, nullptr, 3.0);
    for (std::size_t i = 1; i < v.breaks.size(); ++i) {
        const double t = v.breaks[i];
        if (t <= 1e-9) continue;
        const auto w = [&](std::function<Complex(double, int)> read, double at) {
            return read(at, 0) - a * read(at - 1.0, 0);
        };
        const Complex w_point = w([&](double s, int k) { return v.at(s, k); }, t);
        const Complex w_left = w([&](double s, int k) { return v.left_limit(s, k); }, t);
        CHECK(std::abs(w_point - w_left) <= 1e-12);
    }
}

TEST_CASE("exact convolution with the fundamental columns") {
    const PiecewisePoly q1 = PiecewisePoly::constant(1, 0.0, 3.0, {Complex{1.0, 0.0}});
    const PiecewisePoly q0 = PiecewisePoly::constant(1, 0.0, 3.0, {Complex{0.0, 0.0}});

    // X == 1 for the trivial equation: p(t) = t
    const auto triv = fundamental(1, 1.0, {}, {}, 3.0);
    CHECK(convolve(triv, q0, 2.0)[0] == Complex{0.0, 0.0});
    CHECK(convolve(triv, q1, 2.0)[0].real() == Approx(2.0).margin(1e-14));

    // canonical neutral columns: p(2) = int_0^2 X = 1 + (1.5 + 0.5) = 3
    const auto cols = fundamental(1, 1.0, {DelayTerm{1.0, m1(0.5)}}, {DelayTerm{1.0, m1(1.0)}},
                                  3.0);
    CHECK(convolve(cols, q1, 2.0)[0].real() == Approx(3.0).margin(1e-13));

    // numeric quadrature cross-check at a generic time
    const double t = 2.6;
    double riemann = 0.0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double s = t * (i + 0.5) / N;
        riemann += (t / N) * cols[0].at(t - s, 0).real();
    }
    CHECK(convolve(cols, q1, t)[0].real() == Approx(riemann).margin(1e-4));

    // degree growth sanity: delays >= some positive margin keep it finite
    CHECK_THROWS_AS(solve(1, {DelayTerm{0.0, m1(0.5)}}, {}, q0, nullptr, 1.0),
                    UnsupportedMeasureError);
}
