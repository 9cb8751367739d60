#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "freeconv/ensemble.hpp"

using namespace freeconv;

TEST_CASE("wigner sample is exactly Hermitian with a real diagonal") {
    const HermitianMatrix w = sample_wigner(40, {EntryLaw::gaussian, 1.0}, 123);
    CHECK(w.hermiticity_defect() == 0.0);
    for (int i = 0; i < w.size(); ++i) CHECK(w(i, i).imag() == 0.0);
}

TEST_CASE("seed determinism is bitwise") {
    const HermitianMatrix a = sample_wigner(30, {EntryLaw::gaussian, 0.7}, 99);
    const HermitianMatrix b = sample_wigner(30, {EntryLaw::gaussian, 0.7}, 99);
    CHECK(a.data() == b.data());
    const HermitianMatrix c = sample_wigner(30, {EntryLaw::gaussian, 0.7}, 100);
    CHECK(a.data() != c.data());
}

TEST_CASE("entry law statistics at n = 2000") {
    const int n = 2000;
    for (EntryLaw law : {EntryLaw::gaussian, EntryLaw::uniform_symmetric}) {
        const HermitianMatrix w = sample_wigner(n, {law, 1.0}, 7);
        // off-diagonal second moment E|w_ij|^2 = 1 within 5%
        double s2 = 0.0;
        long cnt = 0;
        double mean_re = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                s2 += std::norm(w(i, j));
                mean_re += w(i, j).real() + w(i, j).imag();
                cnt += 2;
            }
        }
        CHECK(s2 / (static_cast<double>(cnt) / 2) == doctest::Approx(1.0).epsilon(0.05));
        // symmetry: mean of sqrt(2) re/im parts within 3 standard errors of 0
        const double se = std::sqrt(0.5) / std::sqrt(static_cast<double>(cnt));
        CHECK(std::abs(mean_re / static_cast<double>(cnt)) < 3.0 * se);
    }
}

TEST_CASE("uniform law parameters give the exact variance") {
    // variance of uniform[-L, L] is L^2/3, so L = sqrt(3 var) reproduces it
    EntrySampler s({EntryLaw::uniform_symmetric, 2.5}, 11);
    const double lim = std::sqrt(3.0 * 2.5);
    double acc = 0.0, acc2 = 0.0;
    const int cnt = 200000;
    for (int k = 0; k < cnt; ++k) {
        const double x = s.draw();
        CHECK(std::abs(x) <= lim);
        acc += x;
        acc2 += x * x;
    }
    CHECK(acc2 / cnt == doctest::Approx(2.5).epsilon(0.02));
    CHECK(std::abs(acc / cnt) < 3.0 * std::sqrt(2.5 / cnt));
}

TEST_CASE("perturbation spectra") {
    CHECK(build_perturbation(Measure::point_mass(0.0), 5, SpikeSet({{2.0, 1}})) ==
          std::vector<double>{2.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(build_perturbation(Measure::uniform(0.0, 1.0), 4, SpikeSet()) ==
          std::vector<double>{0.875, 0.625, 0.375, 0.125});
    CHECK(build_perturbation(Measure({Atom{-1.0, 0.5}, Atom{1.0, 0.5}}), 6, SpikeSet({{0.0, 2}})) ==
          std::vector<double>{1.0, 1.0, 0.0, 0.0, -1.0, -1.0});
    CHECK_THROWS_AS((void)build_perturbation(Measure::point_mass(0.0), 2, SpikeSet({{1.0, 2}})), SizeError);

    // every non-spiked eigenvalue sits exactly in the support
    const Measure nu({Atom{-1.0, 0.25}, UniformPiece{0.0, 1.0, 0.75}});
    const auto spec = build_perturbation(nu, 101, SpikeSet({{3.0, 1}}));
    int spikes_seen = 0;
    for (double b : spec) {
        if (b == 3.0) {
            ++spikes_seen;
            continue;
        }
        CHECK(nu.in_support(b));
    }
    CHECK(spikes_seen == 1);
}

TEST_CASE("assembled model: trace identity and determinism") {
    const Measure nu = Measure::uniform(-1.0, 1.0);
    const std::vector<double> a_spec = build_perturbation(nu, 50, SpikeSet({{2.0, 1}}));
    const DeformedEnsemble ens{50, {EntryLaw::gaussian, 1.0}, a_spec, 321};
    const HermitianMatrix m = assemble(ens);
    CHECK(m.hermiticity_defect() == 0.0);

    const HermitianMatrix w = sample_wigner(50, {EntryLaw::gaussian, 1.0}, 321);
    double a_sum = 0.0;
    for (double a : a_spec) a_sum += a;
    CHECK(m.trace_real() ==
          doctest::Approx(w.trace_real() / std::sqrt(50.0) + a_sum).epsilon(1e-12));

    const HermitianMatrix m2 = assemble(ens);
    CHECK(m.data() == m2.data());

    DeformedEnsemble bad = ens;
    bad.a_spectrum.pop_back();
    CHECK_THROWS_AS((void)assemble(bad), SizeError);
}

TEST_CASE("rejects invalid parameters") {
    CHECK_THROWS_AS((void)sample_wigner(0, {EntryLaw::gaussian, 1.0}, 1), SizeError);
    CHECK_THROWS_AS(EntrySampler({EntryLaw::gaussian, 0.0}, 1), RangeError);
    CHECK_THROWS_AS(EntrySampler({EntryLaw::gaussian, -1.0}, 1), RangeError);
}
