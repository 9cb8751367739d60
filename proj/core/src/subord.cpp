#include "freeconv/subord.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace freeconv {

namespace {

constexpr double kMergeTol = 1e-9; // gap below which refined intervals are fused

double dist_to(const SupportComponents& comps, double x) {
    double d = std::numeric_limits<double>::infinity();
    for (const Interval& c : comps) d = std::min(d, std::max({c.lo - x, x - c.hi, 0.0}));
    return d;
}

} // namespace

SupportComponents compute_u_components(const Measure& nu, double sigma, int grid_per_unit) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw RangeError("compute_u_components: sigma must be > 0");
    if (grid_per_unit < 2) throw RangeError("compute_u_components: grid resolution must be >= 2");

    const double thresh = 1.0 / (sigma * sigma);
    const auto lifted = [&](double u) { return nu.inv_square_mass(u, 0.0) > thresh; };

    // The closed lifted set lives within distance sigma of supp(nu); pad the
    // scan so both ends start strictly outside it.
    const auto& supp = nu.support_components();
    const double pad = sigma * 1e-3;
    const double lo = supp.front().lo - sigma - pad;
    const double hi = supp.back().hi + sigma + pad;
    const double len = hi - lo;
    const long cells = std::max<long>(64, std::lround(std::ceil(len * grid_per_unit)));
    const double step = len / static_cast<double>(cells);

    if (lifted(lo) || lifted(hi))
        throw InvariantError("compute_u_components: scan endpoints inside the lifted set");

    // Bisect to the floor of double precision (well past the guaranteed
    // 1e-12): the curve height has a square-root edge, so boundary error
    // enters the density as its square root.
    const auto refine = [&](double a, double b, bool lifted_at_a) {
        while (true) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            (lifted(m) == lifted_at_a ? a : b) = m;
        }
        return 0.5 * (a + b);
    };

    std::vector<double> bounds;
    bool prev = false;
    double prev_u = lo;
    for (long k = 1; k <= cells; ++k) {
        const double u = (k == cells) ? hi : lo + step * static_cast<double>(k);
        const bool cur = lifted(u);
        if (cur != prev) bounds.push_back(refine(prev_u, u, prev));
        prev = cur;
        prev_u = u;
    }

    const auto too_close = [&](double x1, double x2) {
        if (x2 - x1 < 4.0 * step) {
            std::ostringstream msg;
            msg << "compute_u_components: boundaries " << x1 << " and " << x2
                << " are closer than 4 grid steps; raise the resolution (current " << grid_per_unit
                << " points per unit)";
            throw ResolutionError(msg.str());
        }
    };
    for (std::size_t i = 1; i < bounds.size(); ++i) too_close(bounds[i - 1], bounds[i]);

    // A gap of the lifted set narrower than one grid cell slips between grid
    // points and would merge components silently. The defining integral is
    // strictly convex between support components, so locate its minimum there
    // exactly and fail loudly when the resulting crossings sit closer than
    // the grid can certify.
    const auto ism0 = [&](double u) { return nu.inv_square_mass(u, 0.0); };
    for (std::size_t i = 0; i + 1 < supp.size(); ++i) {
        const double glo = supp[i].hi;
        const double ghi = supp[i + 1].lo;
        const double inset = (ghi - glo) * 1e-9;
        double a = glo + inset, b = ghi - inset;
        constexpr double kInvPhi = 0.6180339887498949;
        double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
        double f1 = ism0(x1), f2 = ism0(x2);
        for (int it = 0; it < 300 && b - a > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kInvPhi * (b - a);
                f1 = ism0(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kInvPhi * (b - a);
                f2 = ism0(x2);
            }
        }
        const double umin = 0.5 * (a + b);
        if (ism0(umin) > thresh) continue; // the components genuinely connect
        const double cross_lo = refine(glo + inset, umin, true);
        const double cross_hi = refine(umin, ghi - inset, false);
        too_close(cross_lo, cross_hi);
    }

    // Scan starts and ends outside the set, so boundaries alternate entry/exit.
    SupportComponents comps;
    for (std::size_t i = 0; i + 1 < bounds.size(); i += 2) comps.push_back({bounds[i], bounds[i + 1]});

    // A component thinner than one grid cell can slip between grid points; it
    // still contains a support component, so expand outward from any support
    // component the scan left uncovered.
    for (const Interval& sc : supp) {
        const bool covered = std::any_of(comps.begin(), comps.end(), [&](const Interval& c) {
            return c.lo <= sc.lo && sc.hi <= c.hi;
        });
        if (covered) continue;
        double tl = sc.lo, fl = sc.lo - step;
        while (fl > lo && lifted(fl)) { tl = fl; fl -= step; }
        double tr = sc.hi, fr = sc.hi + step;
        while (fr < hi && lifted(fr)) { tr = fr; fr += step; }
        comps.push_back({refine(fl, tl, false), refine(tr, fr, true)});
    }

    std::sort(comps.begin(), comps.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    SupportComponents merged;
    for (const Interval& c : comps) {
        if (!merged.empty() && c.lo <= merged.back().hi + kMergeTol)
            merged.back().hi = std::max(merged.back().hi, c.hi);
        else
            merged.push_back(c);
    }
    return merged;
}

FreeConvolution::FreeConvolution(Measure nu, double sigma, int grid_per_unit)
    : nu_(std::move(nu)), sigma_(sigma), sigma2_(sigma * sigma),
      cdf_cache_(std::make_unique<CdfCache>()) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw RangeError("FreeConvolution: sigma must be > 0");

    u_comps_ = compute_u_components(nu_, sigma_, grid_per_unit);
    support_.reserve(u_comps_.size());
    masses_.reserve(u_comps_.size());
    mass_offsets_.reserve(u_comps_.size());
    double acc = 0.0;
    for (const Interval& c : u_comps_) {
        support_.push_back({psi_map(c.lo), psi_map(c.hi)});
        masses_.push_back(nu_.mass_between(c.lo, c.hi));
        mass_offsets_.push_back(acc);
        acc += masses_.back();
    }

    check_invariants();
}

FreeConvolution::FreeConvolution(const FreeConvolution& other)
    : nu_(other.nu_), sigma_(other.sigma_), sigma2_(other.sigma2_), u_comps_(other.u_comps_),
      support_(other.support_), masses_(other.masses_), mass_offsets_(other.mass_offsets_),
      cdf_cache_(std::make_unique<CdfCache>()) {}

FreeConvolution& FreeConvolution::operator=(const FreeConvolution& other) {
    if (this != &other) *this = FreeConvolution(other);
    return *this;
}

void FreeConvolution::check_invariants() const {
    const auto& supp = nu_.support_components();
    for (const Interval& sc : supp) {
        const bool inside = std::any_of(u_comps_.begin(), u_comps_.end(), [&](const Interval& c) {
            return c.lo <= sc.lo + kMergeTol && sc.hi <= c.hi + kMergeTol;
        });
        if (!inside) throw InvariantError("subord: a support component escapes the lifted set");
    }
    for (const Interval& c : u_comps_) {
        if (dist_to(supp, c.lo) > sigma_ + kMergeTol || dist_to(supp, c.hi) > sigma_ + kMergeTol)
            throw InvariantError("subord: lifted component farther than sigma from the support");
        const bool holds_mass = std::any_of(supp.begin(), supp.end(), [&](const Interval& sc) {
            return c.lo <= sc.lo + kMergeTol && sc.hi <= c.hi + kMergeTol;
        });
        if (!holds_mass) throw InvariantError("subord: lifted component without a support component");
    }
    const double total = std::accumulate(masses_.begin(), masses_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-8)
        throw InvariantError("subord: component masses do not sum to 1");
    for (std::size_t l = 0; l + 1 < support_.size(); ++l)
        if (!(support_[l].hi < support_[l + 1].lo))
            throw InvariantError("subord: support intervals overlap");
}

double FreeConvolution::v_height(double u) const {
    const double thresh = 1.0 / sigma2_;
    if (!(nu_.inv_square_mass(u, 0.0) > thresh)) return 0.0;
    // The defining integral is at most 1/v^2, so it drops below 1/sigma^2 no
    // later than v = sigma: bisect on (0, sigma].
    double lo = 0.0, hi = sigma_;
    int guard = 0;
    while (hi - lo > 1e-12 && ++guard < 300) {
        const double mid = 0.5 * (lo + hi);
        (nu_.inv_square_mass(u, mid) > thresh ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double FreeConvolution::h_map(double u) const { return u + sigma2_ * nu_.stieltjes(u); }

std::complex<double> FreeConvolution::h_map(std::complex<double> z) const {
    return z + sigma2_ * nu_.stieltjes(z);
}

double FreeConvolution::psi_map(double u) const {
    return u + sigma2_ * nu_.cauchy_real(u, v_height(u));
}

int FreeConvolution::support_component_of(double x) const {
    for (std::size_t l = 0; l < support_.size(); ++l)
        if (support_[l].contains(x)) return static_cast<int>(l);
    return -1;
}

double FreeConvolution::psi_inverse(double x) const {
    const int l = support_component_of(x);
    if (l < 0) throw DomainError("psi_inverse: x lies outside the support");
    double a = u_comps_[static_cast<std::size_t>(l)].lo;
    double b = u_comps_[static_cast<std::size_t>(l)].hi;
    // run to the machine floor: the square-root edge of the curve height
    // amplifies any leftover u-error into the density
    while (true) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        (psi_map(mid) < x ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

double FreeConvolution::density(double x) const {
    const int l = support_component_of(x);
    if (l < 0) return 0.0;
    return v_height(psi_inverse(x)) / (std::numbers::pi * sigma2_);
}

double FreeConvolution::h_inverse(double x) const {
    // The stored endpoints carry O(ulp) error; reject anything not clearly
    // outside.
    for (const Interval& c : support_) {
        const double band = 1e-12 * std::max({1.0, std::abs(c.lo), std::abs(c.hi)});
        if (x >= c.lo - band && x <= c.hi + band)
            throw DomainError("h_inverse: x lies in the support of the convolution");
    }

    std::size_t g = 0;
    while (g < support_.size() && support_[g].hi < x) ++g;

    // Bracket in u. On unbounded gaps the point x itself brackets: left of the
    // support H(x) < x (negative Stieltjes transform), right of it H(x) > x.
    double ua, ub;
    if (g == 0) {
        ua = x;
        ub = u_comps_.front().lo;
    } else if (g == support_.size()) {
        ua = u_comps_.back().hi;
        ub = x;
    } else {
        ua = u_comps_[g - 1].hi;
        ub = u_comps_[g].lo;
    }

    // H is strictly increasing here with H' in (0, 2], so a u-interval of
    // width w pins the residual below 2w.
    int guard = 0;
    while (ub - ua > 1e-11 * std::max(1.0, 0.5 * (std::abs(ua) + std::abs(ub))) && ++guard < 300) {
        const double mid = 0.5 * (ua + ub);
        (h_map(mid) < x ? ua : ub) = mid;
    }
    const double u = 0.5 * (ua + ub);
    if (std::abs(h_map(u) - x) > 1e-10)
        throw ConvergenceError("h_inverse: bisection failed to meet the 1e-10 roundtrip");
    return u;
}

const std::vector<FreeConvolution::ComponentCdf>& FreeConvolution::cdf_components() const {
    std::call_once(cdf_cache_->once, [this] { build_cdf_cache_locked(); });
    return cdf_cache_->comps;
}

void FreeConvolution::build_cdf_cache_locked() const {
    std::vector<ComponentCdf>& cache = cdf_cache_->comps;
    cache.resize(support_.size());
    for (std::size_t l = 0; l < support_.size(); ++l) {
        ComponentCdf& cc = cache[l];
        const double a = support_[l].lo;
        const double b = support_[l].hi;
        cc.x.push_back(a);
        cc.cum.push_back(0.0);
        double acc = 0.0;

        // Adaptive Simpson sweep recording every accepted panel; the budget
        // halves per level, which also resolves the square-root edges.
        const auto emit = [&](double xr, double integral) {
            acc += integral;
            cc.x.push_back(xr);
            cc.cum.push_back(acc);
        };
        const std::function<void(double, double, double, double, double, double, double, int, double)> rec =
            [&](double xa, double fa, double xm, double fm, double xb, double fb, double whole, int depth,
                double tol) {
                const double xlm = 0.5 * (xa + xm);
                const double xrm = 0.5 * (xm + xb);
                const double flm = density(xlm);
                const double frm = density(xrm);
                const double left = (xm - xa) / 6.0 * (fa + 4.0 * flm + fm);
                const double right = (xb - xm) / 6.0 * (fm + 4.0 * frm + fb);
                if (depth >= 60 || std::abs(left + right - whole) <= 15.0 * tol) {
                    emit(xm, left);
                    emit(xb, right);
                    return;
                }
                rec(xa, fa, xlm, flm, xm, fm, left, depth + 1, 0.5 * tol);
                rec(xm, fm, xrm, frm, xb, fb, right, depth + 1, 0.5 * tol);
            };

        const double xm = 0.5 * (a + b);
        const double fa = density(a);
        const double fm = density(xm);
        const double fb = density(b);
        rec(a, fa, xm, fm, b, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 0, 1e-10);

        if (!(acc > 0.0)) throw InvariantError("subord: component carries no quadrature mass");
        cc.renorm = masses_[l] / acc;
    }
}

double FreeConvolution::cdf(double x) const {
    if (support_.empty() || x < support_.front().lo) return 0.0;
    for (std::size_t l = 0; l < support_.size(); ++l) {
        if (x < support_[l].lo) return mass_offsets_[l];
        if (x <= support_[l].hi) {
            const ComponentCdf& cc = cdf_components()[l];
            const auto it = std::upper_bound(cc.x.begin(), cc.x.end(), x);
            const std::size_t idx = static_cast<std::size_t>(std::distance(cc.x.begin(), it)) - 1;
            const double xa = cc.x[idx];
            double partial = 0.0;
            if (x > xa) {
                const double h = (x - xa) / 4.0;
                partial = h / 3.0 *
                          (density(xa) + 4.0 * density(xa + h) + 2.0 * density(xa + 2.0 * h) +
                           4.0 * density(xa + 3.0 * h) + density(x));
            }
            const double raw = (cc.cum[idx] + partial) * cc.renorm;
            return mass_offsets_[l] + std::clamp(raw, 0.0, masses_[l]);
        }
    }
    return 1.0;
}

double FreeConvolution::quantile(double alpha) const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw RangeError("quantile: alpha must lie in [0, 1]");
    if (alpha <= 0.0) return support_.front().lo;
    if (alpha >= 1.0) return support_.back().hi;

    double cum = 0.0;
    for (std::size_t l = 0; l < support_.size(); ++l) {
        const double cum_end = cum + masses_[l];
        if (alpha <= cum_end) {
            if (alpha >= cum_end) return support_[l].hi;
            if (alpha <= cum) return l == 0 ? support_[0].lo : support_[l - 1].hi;
            double a = support_[l].lo, b = support_[l].hi;
            int guard = 0;
            while (b - a > 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)) && ++guard < 300) {
                const double mid = 0.5 * (a + b);
                (cdf(mid) < alpha ? a : b) = mid;
            }
            return 0.5 * (a + b);
        }
        cum = cum_end;
    }
    return support_.back().hi;
}

std::complex<double> FreeConvolution::stieltjes_fixed_point(std::complex<double> z) const {
    if (!(z.imag() > 0.0)) throw DomainError("stieltjes_fixed_point: Im z must be > 0");
    constexpr double kStepTol = 1e-13;
    constexpr double kResTol = 1e-12;
    constexpr int kBudget = 100000;

    const auto step = [&](std::complex<double> g) { return nu_.stieltjes(z - sigma2_ * g); };

    std::complex<double> g = 1.0 / z;
    int evals = 0;
    double last_step = std::numeric_limits<double>::infinity();
    while (evals < kBudget) {
        const std::complex<double> g1 = step(g);
        ++evals;
        const std::complex<double> d1 = g1 - g;
        if (std::abs(d1) <= kStepTol) {
            const std::complex<double> r = step(g1) - g1;
            ++evals;
            if (std::abs(r) <= kResTol) return g1;
            g = g1 + r;
            continue;
        }
        const std::complex<double> g2 = step(g1);
        ++evals;
        const std::complex<double> d2 = g2 - g1;
        last_step = std::abs(d2);
        if (last_step <= kStepTol) {
            const std::complex<double> r = step(g2) - g2;
            ++evals;
            if (std::abs(r) <= kResTol) return g2;
            g = g2 + r;
            continue;
        }
        // Aitken delta-squared; keep the accelerated point only when it stays
        // in the lower half-plane and beats the plain step.
        const std::complex<double> den = d2 - d1;
        if (std::abs(den) > 0.0) {
            const std::complex<double> cand = g - d1 * d1 / den;
            if (cand.imag() < 0.0) {
                const std::complex<double> gc = step(cand);
                ++evals;
                if (std::abs(gc - cand) < last_step) {
                    g = gc;
                    continue;
                }
            }
        }
        g = g2;
    }
    std::ostringstream msg;
    msg << "stieltjes_fixed_point: no convergence within " << kBudget
        << " evaluations; last step " << last_step << ", residual " << std::abs(step(g) - g);
    throw ConvergenceError(msg.str());
}

} // namespace freeconv
