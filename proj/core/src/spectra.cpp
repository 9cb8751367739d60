#include "freeconv/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace freeconv {

double ks_distance(const std::vector<double>& eigs_descending, const FreeConvolution& model) {
    const std::size_t n = eigs_descending.size();
    if (n == 0) return 0.0;
    double d = 0.0;
    // descending input: eigs[n-1-i] is the (i+1)-th smallest
    for (std::size_t i = 0; i < n; ++i) {
        const double x = eigs_descending[n - 1 - i];
        const double f = model.cdf(x);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max({d, f - lo, hi - f});
    }
    return d;
}

std::vector<OutlierError> check_outliers(const std::vector<double>& eigs_descending,
                                         const std::vector<SpikePrediction>& predictions,
                                         double tol) {
    const int n = static_cast<int>(eigs_descending.size());
    std::vector<OutlierError> out;
    for (const SpikePrediction& p : predictions) {
        for (int rank : p.ranks) {
            if (rank < 1 || rank > n) {
                std::ostringstream msg;
                msg << "check_outliers: rank " << rank << " outside 1.." << n;
                throw RankError(msg.str());
            }
            OutlierError e;
            e.theta = p.theta;
            e.rank = rank;
            e.predicted = p.limit;
            e.observed = eigs_descending[static_cast<std::size_t>(rank - 1)];
            e.abs_error = std::abs(e.observed - e.predicted);
            e.match = e.abs_error <= tol;
            out.push_back(e);
        }
    }
    return out;
}

std::vector<SeparationCheck> check_separation(const std::vector<double>& eigs_m_descending,
                                              const std::vector<double>& a_spectrum,
                                              const FreeConvolution& model, const SpikeSet& spikes,
                                              const std::vector<Interval>& gaps) {
    std::vector<SeparationCheck> out;
    out.reserve(gaps.size());
    for (const Interval& gap : gaps) {
        SeparationCheck c;
        c.a = gap.lo;
        c.b = gap.hi;
        const auto [ap, bp] = separation_image(model, gap.lo, gap.hi, spikes);
        c.a_prime = ap;
        c.b_prime = bp;
        c.count_m_above_b =
            std::count_if(eigs_m_descending.begin(), eigs_m_descending.end(), [&](double x) { return x > gap.hi; });
        c.count_a_above_b_prime =
            std::count_if(a_spectrum.begin(), a_spectrum.end(), [&](double x) { return x > bp; });
        c.m_eigs_in_gap = std::count_if(eigs_m_descending.begin(), eigs_m_descending.end(),
                                        [&](double x) { return x >= gap.lo && x <= gap.hi; });
        c.match = c.count_m_above_b == c.count_a_above_b_prime;
        out.push_back(c);
    }
    return out;
}

long check_inclusion(const std::vector<double>& eigs, const FreeConvolution& model,
                     const std::vector<SpikePrediction>& predictions, double epsilon) {
    std::vector<double> outliers;
    for (const SpikePrediction& p : predictions)
        if (p.cls.tag == SpikeCase::outlier) outliers.push_back(p.limit);

    long violations = 0;
    for (double x : eigs) {
        double dist = std::numeric_limits<double>::infinity();
        for (const Interval& c : model.support())
            dist = std::min(dist, std::max({c.lo - x, x - c.hi, 0.0}));
        for (double rho : outliers) dist = std::min(dist, std::abs(x - rho));
        if (dist > epsilon) ++violations;
    }
    return violations;
}

} // namespace freeconv
