#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include "freeconv/measure.hpp"

namespace freeconv {

/// Default scan density for locating component boundaries: grid points per
/// unit length of the scanned interval.
inline constexpr int kDefaultGridPerUnit = 4096;

/// Connected components of the closure of
///   U = { u : integral of dnu(x)/(u-x)^2 > 1/sigma^2 },
/// the region where the subordination curve lifts off the real axis. The scan
/// walks supp(nu) + [-sigma, sigma] on a uniform grid, refines every sign
/// change of the defining inequality by bisection to 1e-12, and merges the
/// result with the support components (which the closure always contains).
///
/// Throws ResolutionError when two boundaries fall within four grid steps of
/// each other; callers should retry with a finer grid_per_unit.
SupportComponents compute_u_components(const Measure& nu, double sigma,
                                       int grid_per_unit = kDefaultGridPerUnit);

/// Free additive convolution of a compactly supported measure nu with the
/// semicircle law of variance sigma^2, computed through its real
/// parametrization: the curve height v(u), the analytic map
/// H(z) = z + sigma^2 g(z), and the boundary map Psi(u) = H(u + i v(u)).
/// The support is the Psi-image of the lifted components; the density at
/// Psi(u) equals v(u) / (pi sigma^2).
///
/// Immutable after construction; all queries are pure and safe to call
/// concurrently.
class FreeConvolution {
  public:
    FreeConvolution(Measure nu, double sigma, int grid_per_unit = kDefaultGridPerUnit);

    [[nodiscard]] const Measure& base() const { return nu_; }
    [[nodiscard]] double sigma() const { return sigma_; }

    /// Components [s_l, t_l] of the closed lifted set, ascending.
    [[nodiscard]] const SupportComponents& u_components() const { return u_comps_; }
    /// Support intervals [Psi(s_l), Psi(t_l)], ascending.
    [[nodiscard]] const SupportComponents& support() const { return support_; }
    /// Mass carried by each support component; equals nu([s_l, t_l]).
    [[nodiscard]] const std::vector<double>& component_masses() const { return masses_; }

    /// Height of the subordination curve: 0 where the defining integral stays
    /// below 1/sigma^2, otherwise the unique v in (0, sigma] saturating it
    /// (bisection to 1e-12).
    [[nodiscard]] double v_height(double u) const;

    /// H(u) = u + sigma^2 g(u); strictly increasing outside the closed lifted
    /// set. DomainError when u lies in supp(nu).
    [[nodiscard]] double h_map(double u) const;
    [[nodiscard]] std::complex<double> h_map(std::complex<double> z) const;

    /// Psi(u) = H(u + i v(u)), real by construction; coincides with h_map
    /// wherever v(u) == 0 and is strictly increasing on each lifted component.
    [[nodiscard]] double psi_map(double u) const;

    /// Inverse of psi_map on a support component (bisection to the machine
    /// floor in u). DomainError when x lies outside the support.
    [[nodiscard]] double psi_inverse(double x) const;

    /// Inverse of h_map on the complement of the support: the unique u off
    /// the closed lifted set with H(u) = x, to residual 1e-10. DomainError
    /// when x touches the support.
    [[nodiscard]] double h_inverse(double x) const;

    /// Density of the free convolution: v(psi_inverse(x)) / (pi sigma^2),
    /// 0 outside the support.
    [[nodiscard]] double density(double x) const;

    /// Distribution function; continuous, exact component masses, adaptive
    /// Simpson (1e-9) within components.
    [[nodiscard]] double cdf(double x) const;

    /// Generalized inverse of cdf; quantile(0) and quantile(1) are the
    /// support endpoints. RangeError outside [0, 1].
    [[nodiscard]] double quantile(double alpha) const;

    /// Independent oracle for the Stieltjes transform of the convolution:
    /// iterates g -> g_nu(z - sigma^2 g) from 1/z (with safeguarded Aitken
    /// acceleration) until successive iterates differ by at most 1e-13 and
    /// the fixed-point residual is at most 1e-12. Im z must be positive.
    /// ConvergenceError (reporting the residual) if the budget of 1e5
    /// iterations is exhausted.
    [[nodiscard]] std::complex<double> stieltjes_fixed_point(std::complex<double> z) const;

    FreeConvolution(const FreeConvolution& other);
    FreeConvolution& operator=(const FreeConvolution& other);
    FreeConvolution(FreeConvolution&&) noexcept = default;
    FreeConvolution& operator=(FreeConvolution&&) noexcept = default;

  private:
    Measure nu_;
    double sigma_;
    double sigma2_;
    SupportComponents u_comps_;
    SupportComponents support_;
    std::vector<double> masses_;
    std::vector<double> mass_offsets_; // cumulative mass strictly before component l

    // Per-component cdf data: panel right-endpoints from one adaptive-Simpson
    // sweep plus cumulative raw integrals, and the factor renormalizing the
    // raw total to the exact component mass. Built on first cdf/quantile use.
    struct ComponentCdf {
        std::vector<double> x;   // panel boundaries, x.front() == support lo
        std::vector<double> cum; // raw cumulative integral at each boundary
        double renorm = 1.0;
    };
    struct CdfCache {
        std::once_flag once;
        std::vector<ComponentCdf> comps;
    };
    mutable std::unique_ptr<CdfCache> cdf_cache_;

    const std::vector<ComponentCdf>& cdf_components() const;
    void build_cdf_cache_locked() const;
    void check_invariants() const;
    [[nodiscard]] int support_component_of(double x) const; // -1 if outside
};

} // namespace freeconv
