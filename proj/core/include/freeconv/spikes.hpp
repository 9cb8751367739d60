#pragma once

#include <utility>
#include <vector>

#include "freeconv/subord.hpp"

namespace freeconv {

/// A spiked eigenvalue of the perturbation with its multiplicity.
struct SpikeEntry {
    double theta = 0.0;
    int multiplicity = 1;
};

/// Spikes in strictly descending order of location.
class SpikeSet {
  public:
    SpikeSet() = default;
    explicit SpikeSet(std::vector<SpikeEntry> entries);

    [[nodiscard]] const std::vector<SpikeEntry>& entries() const { return entries_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] int total_multiplicity() const;

  private:
    std::vector<SpikeEntry> entries_;
};

enum class SpikeCase {
    outlier,       ///< off the closed lifted set; eigenvalues escape the support
    edge_right,    ///< sticks to the right endpoint of its support component
    edge_left,     ///< sticks to the left endpoint of its support component
    bulk_quantile, ///< pinned between base-measure components; converges to a quantile
};

const char* to_string(SpikeCase c);

struct SpikeClassification {
    SpikeCase tag = SpikeCase::outlier;
    int component = -1;  ///< lifted-component index for the edge/bulk cases
    double alpha = 0.0;  ///< nu((-inf, theta]); bulk case only
};

struct SpikePrediction {
    double theta = 0.0;
    int multiplicity = 0;
    SpikeClassification cls;
    double limit = 0.0;      ///< predicted limit of the associated eigenvalues
    std::vector<int> ranks;  ///< 1-based descending ranks within the deformed spectrum
};

/// Decides which convergence regime a spike falls in. The spike must lie
/// outside supp(nu) and off the component boundaries (both DomainError).
SpikeClassification classify_spike(const FreeConvolution& model, double theta);

/// Per-spike limits and descending ranks for a matrix of size n whose
/// non-spiked spectrum is bulk (any order; exactly n - r values, SizeError
/// otherwise). Ranks count deformed eigenvalues strictly above each spike.
std::vector<SpikePrediction> predict_spikes(const FreeConvolution& model, const SpikeSet& spikes,
                                            int n, const std::vector<double>& bulk);

/// Image (F(a), F(b)) of a spectral gap [a, b] under the inverse of h_map.
/// [a, b] must stay clear (1e-9 band) of the support and of every outlier
/// limit point of `spikes`; DomainError otherwise. The exact-separation
/// prediction is that the deformed spectrum above b matches the perturbation
/// spectrum above F(b) in cardinality.
std::pair<double, double> separation_image(const FreeConvolution& model, double a, double b,
                                           const SpikeSet& spikes = SpikeSet());

} // namespace freeconv
