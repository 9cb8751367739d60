#include "freeconv/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace freeconv {

const char* to_string(EntryLaw law) {
    switch (law) {
        case EntryLaw::gaussian: return "gaussian";
        case EntryLaw::uniform_symmetric: return "uniform_symmetric";
    }
    return "?";
}

EntrySampler::EntrySampler(EntryDist dist, std::uint64_t seed) : dist_(dist), gen_(seed) {
    if (!(dist.variance > 0.0) || !std::isfinite(dist.variance))
        throw RangeError("EntrySampler: variance must be > 0");
    stddev_ = std::sqrt(dist.variance);
    half_width_ = std::sqrt(3.0 * dist.variance); // uniform on [-L, L] has variance L^2/3
}

double EntrySampler::next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double EntrySampler::draw() {
    if (dist_.law == EntryLaw::uniform_symmetric) return (2.0 * next_unit() - 1.0) * half_width_;

    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - next_unit(); // (0, 1]
    const double u2 = next_unit();
    const double r = stddev_ * std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(ang);
    has_spare_ = true;
    return r * std::cos(ang);
}

HermitianMatrix sample_wigner(int n, EntryDist dist, std::uint64_t seed) {
    if (n < 1) throw SizeError("sample_wigner: n must be >= 1");
    EntrySampler s(dist, seed);
    HermitianMatrix w(n);
    const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
    for (int i = 0; i < n; ++i) {
        w(i, i) = s.draw();
        for (int j = i + 1; j < n; ++j) {
            const double re = s.draw() * inv_sqrt2;
            const double im = s.draw() * inv_sqrt2;
            w(i, j) = {re, im};
            w(j, i) = {re, -im};
        }
    }
    return w;
}

std::vector<double> build_perturbation(const Measure& nu, int n, const SpikeSet& spikes) {
    const int r = spikes.total_multiplicity();
    if (n <= r) throw SizeError("build_perturbation: n must exceed the total spike multiplicity");
    std::vector<double> spec = nu.discretize_quantiles(n - r);
    for (const SpikeEntry& e : spikes.entries())
        spec.insert(spec.end(), static_cast<std::size_t>(e.multiplicity), e.theta);
    std::sort(spec.begin(), spec.end(), std::greater<>());
    return spec;
}

HermitianMatrix assemble(const DeformedEnsemble& ens) {
    if (static_cast<int>(ens.a_spectrum.size()) != ens.n)
        throw SizeError("assemble: a_spectrum length must equal n");
    HermitianMatrix m = sample_wigner(ens.n, ens.dist, ens.seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(ens.n));
    for (auto& z : m.data()) z *= scale;
    for (int i = 0; i < ens.n; ++i) m(i, i) += ens.a_spectrum[static_cast<std::size_t>(i)];
    return m;
}

} // namespace freeconv
