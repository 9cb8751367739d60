#include "freeconv/spikes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace freeconv {

namespace {

constexpr double kBoundaryBand = 1e-12; // spikes this close to s_l/t_l are rejected
constexpr double kGapBand = 1e-9;       // clearance required around the forbidden set

} // namespace

SpikeSet::SpikeSet(std::vector<SpikeEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].multiplicity < 1)
            throw InvariantError("spikes: multiplicities must be >= 1");
        if (!std::isfinite(entries_[i].theta))
            throw InvariantError("spikes: locations must be finite");
        if (i > 0 && !(entries_[i].theta < entries_[i - 1].theta))
            throw InvariantError("spikes: locations must be strictly descending");
    }
}

int SpikeSet::total_multiplicity() const {
    int r = 0;
    for (const SpikeEntry& e : entries_) r += e.multiplicity;
    return r;
}

const char* to_string(SpikeCase c) {
    switch (c) {
        case SpikeCase::outlier: return "outlier";
        case SpikeCase::edge_right: return "edge_right";
        case SpikeCase::edge_left: return "edge_left";
        case SpikeCase::bulk_quantile: return "bulk_quantile";
    }
    return "?";
}

SpikeClassification classify_spike(const FreeConvolution& model, double theta) {
    if (model.base().in_support(theta))
        throw DomainError("classify_spike: spike lies in the support of the base measure");

    const auto& comps = model.u_components();
    int inside = -1;
    for (std::size_t l = 0; l < comps.size(); ++l) {
        if (std::abs(theta - comps[l].lo) <= kBoundaryBand || std::abs(theta - comps[l].hi) <= kBoundaryBand)
            throw DomainError("classify_spike: spike sits exactly on a component boundary");
        if (comps[l].contains(theta)) inside = static_cast<int>(l);
    }
    if (inside < 0) return {SpikeCase::outlier, -1, 0.0};

    const Interval& uc = comps[static_cast<std::size_t>(inside)];
    bool mass_right = false, mass_left = false;
    for (const Interval& sc : model.base().support_components()) {
        if (sc.lo < uc.lo || sc.hi > uc.hi) continue; // other components
        if (sc.lo > theta) mass_right = true;
        if (sc.hi < theta) mass_left = true;
    }
    // Every lifted component carries base mass, and theta is off the support,
    // so at least one side is occupied.
    if (!mass_right && !mass_left)
        throw InvariantError("classify_spike: lifted component without base mass");

    if (!mass_right) return {SpikeCase::edge_right, inside, 0.0};
    if (!mass_left) return {SpikeCase::edge_left, inside, 0.0};
    return {SpikeCase::bulk_quantile, inside, model.base().cdf(theta)};
}

std::vector<SpikePrediction> predict_spikes(const FreeConvolution& model, const SpikeSet& spikes,
                                            int n, const std::vector<double>& bulk) {
    const int r = spikes.total_multiplicity();
    if (static_cast<int>(bulk.size()) != n - r)
        throw SizeError("predict_spikes: bulk spectrum must hold n - r values");

    std::vector<SpikePrediction> out;
    out.reserve(spikes.entries().size());
    for (const SpikeEntry& e : spikes.entries()) {
        SpikePrediction p;
        p.theta = e.theta;
        p.multiplicity = e.multiplicity;
        p.cls = classify_spike(model, e.theta);
        switch (p.cls.tag) {
            case SpikeCase::outlier: p.limit = model.h_map(e.theta); break;
            case SpikeCase::edge_right:
                p.limit = model.support()[static_cast<std::size_t>(p.cls.component)].hi;
                break;
            case SpikeCase::edge_left:
                p.limit = model.support()[static_cast<std::size_t>(p.cls.component)].lo;
                break;
            case SpikeCase::bulk_quantile: p.limit = model.quantile(p.cls.alpha); break;
        }

        // Descending ranks = 1 + number of perturbation eigenvalues above theta.
        long above = std::count_if(bulk.begin(), bulk.end(), [&](double b) { return b > e.theta; });
        for (const SpikeEntry& other : spikes.entries())
            if (other.theta > e.theta) above += other.multiplicity;
        p.ranks.resize(static_cast<std::size_t>(e.multiplicity));
        for (int i = 0; i < e.multiplicity; ++i) p.ranks[static_cast<std::size_t>(i)] = static_cast<int>(above) + 1 + i;
        out.push_back(std::move(p));
    }
    return out;
}

std::pair<double, double> separation_image(const FreeConvolution& model, double a, double b,
                                           const SpikeSet& spikes) {
    if (!(a < b)) throw DomainError("separation_image: need a < b");
    for (const Interval& c : model.support()) {
        if (a <= c.hi + kGapBand && b >= c.lo - kGapBand)
            throw DomainError("separation_image: [a, b] meets the support of the convolution");
    }
    for (const SpikeEntry& e : spikes.entries()) {
        const SpikeClassification cls = classify_spike(model, e.theta);
        if (cls.tag != SpikeCase::outlier) continue;
        const double rho = model.h_map(e.theta);
        if (rho >= a - kGapBand && rho <= b + kGapBand) {
            std::ostringstream msg;
            msg << "separation_image: outlier limit " << rho << " lies in [a, b]";
            throw DomainError(msg.str());
        }
    }
    return {model.h_inverse(a), model.h_inverse(b)};
}

} // namespace freeconv
