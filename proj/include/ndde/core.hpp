#pragma once

// Shared scalar types, norms and error taxonomy for the ndde library.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ndde {

using Complex = std::complex<double>;
using Vec = std::vector<Complex>;

/// Absolute tolerance used when snapping nearby time coordinates
/// (grid nodes vs. breakpoints, domain endpoints, ...).
inline constexpr double kTimeTol = 1e-12;

/// Max-norm on C^n. This is the vector norm used project-wide; together
/// with the sup-norm on functions it makes operator norms exact row sums
/// of total variations.
[[nodiscard]] inline double inf_norm(const Vec& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

[[nodiscard]] inline Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

[[nodiscard]] inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

[[nodiscard]] inline Vec operator*(Complex c, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation or segment extraction outside a function's domain.
struct OutOfDomainError : Error {
    using Error::Error;
};

/// Two piecewise functions whose domains must abut or agree do not.
struct DomainMismatchError : Error {
    using Error::Error;
};

/// Vector/matrix dimension disagreement.
struct DimensionError : Error {
    using Error::Error;
};

/// The neutral functional has support reaching up to 0, so no positive
/// strict-delay margin exists.
struct NotStrictlyDelayedError : Error {
    using Error::Error;
};

/// Fixed-point iteration failed to contract within the iteration budget.
struct PicardDivergedError : Error {
    using Error::Error;
};

/// Mollification step 1/m does not fit between adjacent breakpoints.
struct GapTooSmallError : Error {
    using Error::Error;
};

/// The exact stepper only handles atom-only functionals.
struct UnsupportedMeasureError : Error {
    using Error::Error;
};

/// Invalid solver configuration (step size, contraction constant, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// Scenario file could not be parsed or validated.
struct ScenarioError : Error {
    using Error::Error;
};

} // namespace ndde
