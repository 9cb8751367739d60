#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "freeconv/hermitian.hpp"
#include "freeconv/measure.hpp"
#include "freeconv/spikes.hpp"

namespace freeconv {

enum class EntryLaw {
    gaussian,          ///< centered normal
    uniform_symmetric, ///< uniform on [-sqrt(3 var), +sqrt(3 var)]
};

/// Entry distribution of the random matrix: symmetric about 0 with the given
/// variance. Both offered laws satisfy a Poincare inequality.
struct EntryDist {
    EntryLaw law = EntryLaw::gaussian;
    double variance = 1.0;
};

const char* to_string(EntryLaw law);

/// Name of the generator recorded in reports for reproducibility.
inline constexpr const char* kRngName = "mt19937_64+box-muller";

/// Deterministic stream of entry-law variates. mt19937_64 output is pinned by
/// the standard and the transforms are explicit, so equal seeds give equal
/// streams on every platform.
class EntrySampler {
  public:
    EntrySampler(EntryDist dist, std::uint64_t seed);

    double draw();

  private:
    EntryDist dist_;
    std::mt19937_64 gen_;
    double half_width_ = 0.0; // uniform law
    double stddev_ = 1.0;     // gaussian law
    bool has_spare_ = false;
    double spare_ = 0.0;

    double next_unit(); // [0, 1)
};

/// Wigner matrix with the convention that the diagonal entries and
/// sqrt(2) Re / sqrt(2) Im of the off-diagonal entries are i.i.d. entry-law
/// variates. Conjugate symmetry is exact and the draw order is fixed
/// (row by row: diagonal, then re/im pairs for j > i), so the result is a
/// pure function of (n, dist, seed).
HermitianMatrix sample_wigner(int n, EntryDist dist, std::uint64_t seed);

/// Deterministic perturbation spectrum: quantile-midpoint discretization of
/// nu at n - r points plus each spike repeated with its multiplicity, sorted
/// descending. SizeError when n <= total spike multiplicity.
std::vector<double> build_perturbation(const Measure& nu, int n, const SpikeSet& spikes);

/// Additively deformed Wigner ensemble: W/sqrt(n) + diag(a_spectrum).
struct DeformedEnsemble {
    int n = 0;
    EntryDist dist;
    std::vector<double> a_spectrum; ///< descending, length n
    std::uint64_t seed = 0;
};

HermitianMatrix assemble(const DeformedEnsemble& ens);

} // namespace freeconv
