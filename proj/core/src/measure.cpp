#include "freeconv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace freeconv {

namespace {

constexpr double kWeightSumTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

Measure::Measure(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw InvariantError("measure: no pieces");

    double total = 0.0;
    std::vector<Interval> raw;
    raw.reserve(pieces_.size());
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            if (!(a->w > 0.0) || !std::isfinite(a->x) || !std::isfinite(a->w))
                throw InvariantError("measure: atom needs finite location and weight > 0");
            total += a->w;
            raw.push_back({a->x, a->x});
            breakpoints_.push_back(a->x);
        } else {
            const auto& u = std::get<UniformPiece>(p);
            if (!(u.w > 0.0) || !std::isfinite(u.a) || !std::isfinite(u.b) || !std::isfinite(u.w))
                throw InvariantError("measure: uniform piece needs finite parameters and weight > 0");
            if (!(u.a < u.b)) throw InvariantError("measure: uniform piece needs a < b");
            total += u.w;
            raw.push_back({u.a, u.b});
            breakpoints_.push_back(u.a);
            breakpoints_.push_back(u.b);
        }
    }
    if (std::abs(total - 1.0) > kWeightSumTol)
        throw InvariantError("measure: weights must sum to 1 within 1e-12");

    std::sort(raw.begin(), raw.end(), [](const Interval& l, const Interval& r) {
        return l.lo < r.lo || (l.lo == r.lo && l.hi < r.hi);
    });
    for (const Interval& iv : raw) {
        if (!support_.empty() && iv.lo <= support_.back().hi)
            support_.back().hi = std::max(support_.back().hi, iv.hi);
        else
            support_.push_back(iv);
    }

    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

bool Measure::in_support(double x) const {
    auto it = std::upper_bound(support_.begin(), support_.end(), x,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == support_.begin()) return false;
    return std::prev(it)->contains(x);
}

std::complex<double> Measure::stieltjes(std::complex<double> z) const {
    if (z.imag() == 0.0) return {stieltjes(z.real()), 0.0};
    std::complex<double> g = 0.0;
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            g += a->w / (z - a->x);
        } else {
            const auto& u = std::get<UniformPiece>(p);
            // Principal branch: (z-a)/(z-b) stays in one half-plane for
            // Im z != 0, so log is continuous off [a, b].
            g += u.w / (u.b - u.a) * std::log((z - u.a) / (z - u.b));
        }
    }
    return g;
}

double Measure::stieltjes(double u) const {
    if (in_support(u)) throw DomainError("stieltjes: real argument lies in the support");
    double g = 0.0;
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            g += a->w / (u - a->x);
        } else {
            const auto& up = std::get<UniformPiece>(p);
            g += up.w / (up.b - up.a) * std::log((u - up.a) / (u - up.b));
        }
    }
    return g;
}

double Measure::stieltjes_derivative(double u) const {
    if (in_support(u)) throw DomainError("stieltjes_derivative: argument lies in the support");
    double d = 0.0;
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            const double t = u - a->x;
            d -= a->w / (t * t);
        } else {
            const auto& up = std::get<UniformPiece>(p);
            d -= up.w / ((u - up.a) * (u - up.b));
        }
    }
    return d;
}

std::complex<double> Measure::stieltjes_derivative(std::complex<double> z) const {
    std::complex<double> d = 0.0;
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            const std::complex<double> t = z - a->x;
            d -= a->w / (t * t);
        } else {
            const auto& up = std::get<UniformPiece>(p);
            d -= up.w / ((z - up.a) * (z - up.b));
        }
    }
    return d;
}

double Measure::inv_square_mass(double u, double v) const {
    if (v < 0.0) throw RangeError("inv_square_mass: v must be >= 0");
    const double v2 = v * v;
    double s = 0.0;
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            const double t = u - a->x;
            const double den = t * t + v2;
            s += den > 0.0 ? a->w / den : kInf;
        } else {
            const auto& up = std::get<UniformPiece>(p);
            const double dens = up.w / (up.b - up.a);
            if (v > 0.0) {
                s += dens * (std::atan((u - up.a) / v) - std::atan((u - up.b) / v)) / v;
            } else if (u >= up.a && u <= up.b) {
                s = kInf; // Cauchy integral diverges on the piece
            } else {
                s += up.w / ((u - up.a) * (u - up.b));
            }
        }
        if (s == kInf) return kInf;
    }
    return s;
}

double Measure::cauchy_real(double u, double v) const {
    const double v2 = v * v;
    double s = 0.0;
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            const double t = u - a->x;
            const double den = t * t + v2;
            if (den > 0.0) s += a->w * t / den;
            // den == 0 only at v == 0 on the atom itself: principal value 0
        } else {
            const auto& up = std::get<UniformPiece>(p);
            const double ta = u - up.a;
            const double tb = u - up.b;
            s += 0.5 * up.w / (up.b - up.a) * std::log((ta * ta + v2) / (tb * tb + v2));
        }
    }
    return s;
}

double Measure::cdf(double x) const {
    double f = 0.0;
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            if (x >= a->x) f += a->w;
        } else {
            const auto& u = std::get<UniformPiece>(p);
            f += u.w * std::clamp((x - u.a) / (u.b - u.a), 0.0, 1.0);
        }
    }
    return f;
}

double Measure::cdf_left(double x) const {
    double f = 0.0;
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            if (x > a->x) f += a->w;
        } else {
            const auto& u = std::get<UniformPiece>(p);
            f += u.w * std::clamp((x - u.a) / (u.b - u.a), 0.0, 1.0);
        }
    }
    return f;
}

double Measure::quantile(double alpha) const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw RangeError("quantile: alpha must lie in [0, 1]");
    if (alpha <= 0.0) return support_min();

    // Walk the breakpoints; the cdf is piecewise linear between them with
    // jumps exactly at atoms, so the generalized inverse is exact.
    const std::size_t m = breakpoints_.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double p = breakpoints_[i];
        const double fl = cdf_left(p);
        const double fr = cdf(p);
        if (alpha <= fr && alpha > fl) return p;
        if (i + 1 < m) {
            const double q = breakpoints_[i + 1];
            const double fq = cdf_left(q);
            if (alpha > fr && alpha <= fq) {
                const double t = (alpha - fr) / (fq - fr);
                return p + t * (q - p);
            }
        }
    }
    return support_max();
}

double Measure::mass_between(double lo, double hi) const {
    if (hi < lo) return 0.0;
    double m = 0.0;
    for (const Piece& p : pieces_) {
        if (const Atom* a = std::get_if<Atom>(&p)) {
            if (a->x >= lo && a->x <= hi) m += a->w;
        } else {
            const auto& u = std::get<UniformPiece>(p);
            const double overlap = std::min(hi, u.b) - std::max(lo, u.a);
            if (overlap > 0.0) m += u.w * overlap / (u.b - u.a);
        }
    }
    return m;
}

std::vector<double> Measure::discretize_quantiles(int n) const {
    if (n < 1) throw RangeError("discretize_quantiles: n must be >= 1");
    std::vector<double> q(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) q[static_cast<std::size_t>(j - 1)] = quantile((j - 0.5) / n);
    std::sort(q.begin(), q.end());
    return q;
}

} // namespace freeconv
