#pragma once

#include <vector>

#include "freeconv/hermitian.hpp"
#include "freeconv/spikes.hpp"
#include "freeconv/subord.hpp"

namespace freeconv {

/// All eigenvalues of a complex Hermitian matrix, descending. Householder
/// reduction to real tridiagonal form followed by implicit-shift QL.
/// The input must be Hermitian within 1e-12 entrywise (DomainError);
/// ConvergenceError if an eigenvalue fails to settle within 50 sweeps.
std::vector<double> eigenvalues_descending(const HermitianMatrix& m);

/// Kolmogorov-Smirnov distance between the empirical spectral distribution
/// and the free-convolution cdf.
double ks_distance(const std::vector<double>& eigs_descending, const FreeConvolution& model);

struct OutlierError {
    double theta = 0.0;
    int rank = 0;
    double predicted = 0.0;
    double observed = 0.0;
    double abs_error = 0.0;
    bool match = false;
};

/// Reads the eigenvalues at each predicted descending rank and reports the
/// deviation from the predicted limit. RankError if a rank exceeds n.
std::vector<OutlierError> check_outliers(const std::vector<double>& eigs_descending,
                                         const std::vector<SpikePrediction>& predictions,
                                         double tol);

struct SeparationCheck {
    double a = 0.0, b = 0.0;
    double a_prime = 0.0, b_prime = 0.0;
    long count_m_above_b = 0;
    long count_a_above_b_prime = 0;
    bool match = false;       ///< the two counts agree
    long m_eigs_in_gap = 0;   ///< deformed eigenvalues falling inside [a, b]
};

/// Exact-separation check: the gap [a, b] in the deformed spectrum must split
/// it exactly as its image under the inverse subordination map splits the
/// perturbation spectrum.
std::vector<SeparationCheck> check_separation(const std::vector<double>& eigs_m_descending,
                                              const std::vector<double>& a_spectrum,
                                              const FreeConvolution& model, const SpikeSet& spikes,
                                              const std::vector<Interval>& gaps);

/// Number of eigenvalues farther than epsilon from the support of the
/// convolution united with the outlier limit points.
long check_inclusion(const std::vector<double>& eigs, const FreeConvolution& model,
                     const std::vector<SpikePrediction>& predictions, double epsilon);

/// Verification statistics of one simulated spectrum.
struct SpectrumReport {
    std::vector<double> eigenvalues; ///< descending
    double ks_distance = 0.0;
    std::vector<OutlierError> outlier_errors;
    std::vector<SeparationCheck> separation;
    long inclusion_violations = 0;
};

} // namespace freeconv
