#include "freeconv/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace freeconv {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

VerifyReport run_verification(const VerifyConfig& cfg) {
    if (cfg.n < 2) throw SizeError("verify: n must be >= 2");
    if (cfg.trials < 1) throw SizeError("verify: trials must be >= 1");

    const double sigma = std::sqrt(cfg.dist.variance);
    const FreeConvolution model(cfg.measure, sigma, cfg.resolution);

    const int r = cfg.spikes.total_multiplicity();
    const std::vector<double> bulk = cfg.measure.discretize_quantiles(cfg.n - r);
    const std::vector<double> a_spectrum = build_perturbation(cfg.measure, cfg.n, cfg.spikes);
    const std::vector<SpikePrediction> predictions = predict_spikes(model, cfg.spikes, cfg.n, bulk);

    VerifyReport rep;
    rep.sigma = sigma;
    rep.u_components = model.u_components();
    rep.support = model.support();
    rep.masses = model.component_masses();
    rep.predictions = predictions;
    rep.trials.resize(static_cast<std::size_t>(cfg.trials));

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        std::min<unsigned>(cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw,
                           static_cast<unsigned>(cfg.trials));

    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.trials));
    const auto worker = [&]() {
        while (true) {
            const int t = next.fetch_add(1);
            if (t >= cfg.trials) return;
            try {
                TrialResult& res = rep.trials[static_cast<std::size_t>(t)];
                res.seed = cfg.seed + static_cast<std::uint64_t>(t);
                const DeformedEnsemble ens{cfg.n, cfg.dist, a_spectrum, res.seed};
                const std::vector<double> eigs = eigenvalues_descending(assemble(ens));
                res.lambda_max = eigs.front();
                res.lambda_min = eigs.back();
                res.report.ks_distance = ks_distance(eigs, model);
                res.report.outlier_errors = check_outliers(eigs, predictions, cfg.tol.outlier);
                res.report.separation = check_separation(eigs, a_spectrum, model, cfg.spikes, cfg.gaps);
                res.report.inclusion_violations =
                    check_inclusion(eigs, model, predictions, cfg.tol.inclusion_eps);
                if (cfg.emit_eigenvalues) res.report.eigenvalues = eigs;
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

    rep.required_seed_successes =
        cfg.tol.min_seed_successes >= 0 ? cfg.tol.min_seed_successes : std::max(cfg.trials - 1, 1);

    bool all_pass = true;

    // Per spike: the trial error is the worst deviation over its ranks; the
    // aggregate is the median of those over seeds.
    for (const SpikePrediction& p : predictions) {
        std::vector<double> errs;
        errs.reserve(rep.trials.size());
        for (const TrialResult& t : rep.trials) {
            double worst = 0.0;
            for (const OutlierError& oe : t.report.outlier_errors)
                if (oe.theta == p.theta) worst = std::max(worst, oe.abs_error);
            errs.push_back(worst);
        }
        SpikeAggregate agg;
        agg.theta = p.theta;
        agg.tag = p.cls.tag;
        agg.limit = p.limit;
        agg.median_abs_error = median(errs);
        agg.pass = agg.median_abs_error <= cfg.tol.outlier;
        all_pass = all_pass && agg.pass;
        rep.spike_aggregates.push_back(agg);
    }

    std::vector<double> ks;
    ks.reserve(rep.trials.size());
    for (const TrialResult& t : rep.trials) ks.push_back(t.report.ks_distance);
    rep.median_ks = median(ks);
    rep.ks_pass = rep.median_ks <= cfg.tol.ks;
    all_pass = all_pass && rep.ks_pass;

    rep.inclusion_clean_seeds = 0;
    for (const TrialResult& t : rep.trials)
        if (t.report.inclusion_violations == 0) ++rep.inclusion_clean_seeds;
    rep.inclusion_pass = rep.inclusion_clean_seeds >= rep.required_seed_successes;
    all_pass = all_pass && rep.inclusion_pass;

    for (std::size_t g = 0; g < cfg.gaps.size(); ++g) {
        GapAggregate agg;
        agg.a = cfg.gaps[g].lo;
        agg.b = cfg.gaps[g].hi;
        for (const TrialResult& t : rep.trials)
            if (t.report.separation[g].match) ++agg.seeds_matched;
        agg.pass = agg.seeds_matched >= rep.required_seed_successes;
        all_pass = all_pass && agg.pass;
        rep.gap_aggregates.push_back(agg);
    }

    rep.pass = all_pass;
    return rep;
}

} // namespace freeconv
