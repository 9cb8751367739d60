#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "freeconv/errors.hpp"

namespace freeconv {

/// Closed interval [lo, hi]; degenerate (lo == hi) for isolated points.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
    [[nodiscard]] double length() const { return hi - lo; }
};

struct Atom {
    double x = 0.0; ///< location
    double w = 1.0; ///< weight, > 0
};

struct UniformPiece {
    double a = 0.0; ///< left endpoint, a < b
    double b = 1.0; ///< right endpoint
    double w = 1.0; ///< total weight of the piece, > 0
};

using Piece = std::variant<Atom, UniformPiece>;

/// Minimal ordered disjoint cover of a support.
using SupportComponents = std::vector<Interval>;

/// Compactly supported probability measure given as a finite mixture of
/// atoms and uniform interval pieces. Every integral transform needed by the
/// subordination machinery has a closed form over this family, so the core
/// path is quadrature-free.
///
/// Immutable after construction; all queries are pure and thread-safe.
class Measure {
  public:
    /// Validates: weights > 0 summing to 1 within 1e-12, uniform pieces with
    /// a < b, all coordinates finite. Throws InvariantError otherwise.
    explicit Measure(std::vector<Piece> pieces);

    static Measure point_mass(double x) { return Measure({Atom{x, 1.0}}); }
    static Measure uniform(double a, double b) { return Measure({UniformPiece{a, b, 1.0}}); }

    [[nodiscard]] const std::vector<Piece>& pieces() const { return pieces_; }

    /// Cauchy/Stieltjes transform g(z) = integral of 1/(z - x) dnu(x),
    /// analytic off the support (principal log branch on uniform pieces).
    /// For real z the argument must lie outside the support (DomainError).
    [[nodiscard]] std::complex<double> stieltjes(std::complex<double> z) const;
    [[nodiscard]] double stieltjes(double u) const;

    /// g'(u) = -integral of 1/(u - x)^2 dnu(x); strictly negative.
    [[nodiscard]] double stieltjes_derivative(double u) const;
    [[nodiscard]] std::complex<double> stieltjes_derivative(std::complex<double> z) const;

    /// integral of dnu(x) / ((u - x)^2 + v^2). Returns +infinity when v == 0
    /// and u sits on an atom or inside an interval piece; the infinite value
    /// is a first-class result, not an error. Strictly decreasing in v > 0.
    [[nodiscard]] double inv_square_mass(double u, double v) const;

    /// integral of (u - x) dnu(x) / ((u - x)^2 + v^2), i.e. Re g(u + iv).
    [[nodiscard]] double cauchy_real(double u, double v) const;

    /// Right-continuous distribution function nu((-inf, x]).
    [[nodiscard]] double cdf(double x) const;
    /// Left limit nu((-inf, x)).
    [[nodiscard]] double cdf_left(double x) const;

    /// Generalized inverse inf{x : cdf(x) >= alpha}; quantile(0) is the left
    /// support endpoint. Throws RangeError for alpha outside [0, 1].
    [[nodiscard]] double quantile(double alpha) const;

    /// nu([lo, hi]) for a closed interval.
    [[nodiscard]] double mass_between(double lo, double hi) const;

    [[nodiscard]] const SupportComponents& support_components() const { return support_; }
    [[nodiscard]] bool in_support(double x) const;
    [[nodiscard]] double support_min() const { return support_.front().lo; }
    [[nodiscard]] double support_max() const { return support_.back().hi; }

    /// Quantile-midpoint discretization: quantile((j - 1/2)/n) for j = 1..n,
    /// ascending. Every returned point lies in the support. Throws RangeError
    /// for n < 1.
    [[nodiscard]] std::vector<double> discretize_quantiles(int n) const;

  private:
    std::vector<Piece> pieces_;
    SupportComponents support_;
    std::vector<double> breakpoints_; // sorted distinct piece endpoints / atom locations
};

} // namespace freeconv
