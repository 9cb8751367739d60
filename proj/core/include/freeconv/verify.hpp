#pragma once

#include <cstdint>
#include <vector>

#include "freeconv/ensemble.hpp"
#include "freeconv/spectra.hpp"

namespace freeconv {

/// Pass thresholds for the statistical checks. Medians are taken over the
/// trial seeds; the counting checks require min_seed_successes clean seeds
/// (default: all but one).
struct VerifyTolerances {
    double outlier = 0.15;       ///< median |observed - limit| per spike
    double ks = 0.05;            ///< median KS distance
    double inclusion_eps = 0.2;  ///< support-inclusion neighbourhood
    int min_seed_successes = -1; ///< -1: trials - 1
};

struct VerifyConfig {
    int n = 2000;
    EntryDist dist{};
    Measure measure = Measure::point_mass(0.0);
    SpikeSet spikes{};
    std::uint64_t seed = 42;
    int trials = 10;
    int resolution = kDefaultGridPerUnit;
    std::vector<Interval> gaps{};
    VerifyTolerances tol{};
    bool emit_eigenvalues = false; ///< keep full spectra in the report
    int threads = 0;               ///< 0: hardware concurrency
};

struct TrialResult {
    std::uint64_t seed = 0;
    SpectrumReport report; ///< eigenvalues kept only when emit_eigenvalues
    double lambda_max = 0.0;
    double lambda_min = 0.0;
};

struct SpikeAggregate {
    double theta = 0.0;
    SpikeCase tag = SpikeCase::outlier;
    double limit = 0.0;
    double median_abs_error = 0.0;
    bool pass = false;
};

struct GapAggregate {
    double a = 0.0, b = 0.0;
    int seeds_matched = 0;
    bool pass = false;
};

struct VerifyReport {
    double sigma = 0.0;
    SupportComponents u_components;
    SupportComponents support;
    std::vector<double> masses;
    std::vector<SpikePrediction> predictions;
    std::vector<TrialResult> trials;
    std::vector<SpikeAggregate> spike_aggregates;
    std::vector<GapAggregate> gap_aggregates;
    double median_ks = 0.0;
    bool ks_pass = false;
    int inclusion_clean_seeds = 0;
    bool inclusion_pass = false;
    int required_seed_successes = 0;
    bool pass = false;
};

/// Runs `trials` seeded simulations of the deformed ensemble (trial t uses
/// seed + t), evaluates every check against the model, and aggregates.
/// Trials run concurrently; the result is independent of the schedule.
VerifyReport run_verification(const VerifyConfig& cfg);

} // namespace freeconv
