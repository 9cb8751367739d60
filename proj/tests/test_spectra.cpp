#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "freeconv/ensemble.hpp"
#include "freeconv/spectra.hpp"

#if defined(FREECONV_HAVE_EIGEN)
#include <Eigen/Dense>
#endif

using namespace freeconv;
using std::complex;

namespace {

HermitianMatrix random_hermitian(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    HermitianMatrix m(n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = nd(gen);
        for (int j = i + 1; j < n; ++j) {
            const complex<double> z(nd(gen), nd(gen));
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

// Random unitary via Gram-Schmidt on a complex Gaussian matrix (test-only).
std::vector<complex<double>> random_unitary(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<complex<double>> u(static_cast<std::size_t>(n) * n);
    for (auto& z : u) z = {nd(gen), nd(gen)};
    for (int c = 0; c < n; ++c) {
        for (int prev = 0; prev < c; ++prev) {
            complex<double> dot = 0.0;
            for (int r = 0; r < n; ++r)
                dot += std::conj(u[static_cast<std::size_t>(r) * n + prev]) * u[static_cast<std::size_t>(r) * n + c];
            for (int r = 0; r < n; ++r)
                u[static_cast<std::size_t>(r) * n + c] -= dot * u[static_cast<std::size_t>(r) * n + prev];
        }
        double norm = 0.0;
        for (int r = 0; r < n; ++r) norm += std::norm(u[static_cast<std::size_t>(r) * n + c]);
        norm = std::sqrt(norm);
        for (int r = 0; r < n; ++r) u[static_cast<std::size_t>(r) * n + c] /= norm;
    }
    return u;
}

HermitianMatrix conjugate(const HermitianMatrix& m, const std::vector<complex<double>>& u) {
    const int n = m.size();
    // t = M U
    std::vector<complex<double>> t(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const complex<double> mik = m(i, k);
            for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(i) * n + j] += mik * u[static_cast<std::size_t>(k) * n + j];
        }
    HermitianMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            complex<double> acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += std::conj(u[static_cast<std::size_t>(k) * n + i]) * t[static_cast<std::size_t>(k) * n + j];
            out(i, j) = acc;
        }
    // symmetrize away the last-ulp asymmetry of the two matrix products
    for (int i = 0; i < n; ++i) {
        out(i, i) = out(i, i).real();
        for (int j = i + 1; j < n; ++j) {
            const complex<double> avg = 0.5 * (out(i, j) + std::conj(out(j, i)));
            out(i, j) = avg;
            out(j, i) = std::conj(avg);
        }
    }
    return out;
}

} // namespace

TEST_CASE("eigenvalues of small fixed matrices") {
    CHECK(eigenvalues_descending(HermitianMatrix::diagonal({3.0, 1.0, 2.0})) ==
          std::vector<double>{3.0, 2.0, 1.0});

    HermitianMatrix flip(2);
    flip(0, 1) = 1.0;
    flip(1, 0) = 1.0;
    const auto e = eigenvalues_descending(flip);
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e[1] == doctest::Approx(-1.0).epsilon(1e-14));

    HermitianMatrix imag2(2);
    imag2(0, 1) = complex<double>(0.0, -1.0);
    imag2(1, 0) = complex<double>(0.0, 1.0);
    const auto e2 = eigenvalues_descending(imag2);
    CHECK(e2[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e2[1] == doctest::Approx(-1.0).epsilon(1e-14));

    HermitianMatrix one(1);
    one(0, 0) = -4.5;
    CHECK(eigenvalues_descending(one) == std::vector<double>{-4.5});
}

TEST_CASE("non-Hermitian input is rejected") {
    HermitianMatrix m(3);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0 + 1e-9;
    CHECK_THROWS_AS((void)eigenvalues_descending(m), DomainError);
}

TEST_CASE("trace and Frobenius conservation on random matrices") {
    std::mt19937_64 seeds(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(seeds() % 199);
        const HermitianMatrix m = random_hermitian(n, seeds());
        const auto eigs = eigenvalues_descending(m);
        REQUIRE(static_cast<int>(eigs.size()) == n);
        for (std::size_t i = 1; i < eigs.size(); ++i) CHECK(eigs[i - 1] >= eigs[i]);

        double sum = 0.0, sum2 = 0.0;
        for (double x : eigs) {
            sum += x;
            sum2 += x * x;
        }
        const double scale = std::sqrt(m.frobenius_sq());
        CHECK(std::abs(sum - m.trace_real()) <= 1e-8 * n * scale + 1e-12);
        CHECK(std::abs(sum2 - m.frobenius_sq()) <= 1e-8 * n * scale * scale + 1e-12);
    }
}

#if defined(FREECONV_HAVE_EIGEN)
TEST_CASE("agrees with an independent dense eigensolver") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const int n = 50;
        const HermitianMatrix m = random_hermitian(n, seed);
        Eigen::MatrixXcd em(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) em(i, j) = m(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(em, Eigen::EigenvaluesOnly);
        const auto ours = eigenvalues_descending(m);
        for (int i = 0; i < n; ++i)
            CHECK(ours[static_cast<std::size_t>(i)] ==
                  doctest::Approx(solver.eigenvalues()(n - 1 - i)).epsilon(1e-10));
    }
}
#endif

TEST_CASE("eigenvalues are invariant under unitary conjugation") {
    const int n = 30;
    const HermitianMatrix m = random_hermitian(n, 77);
    const auto u = random_unitary(n, 78);
    const HermitianMatrix c = conjugate(m, u);
    REQUIRE(c.hermiticity_defect() <= 1e-12);
    const auto e1 = eigenvalues_descending(m);
    const auto e2 = eigenvalues_descending(c);
    for (int i = 0; i < n; ++i)
        CHECK(e1[static_cast<std::size_t>(i)] == doctest::Approx(e2[static_cast<std::size_t>(i)]).epsilon(1e-8));
}

TEST_CASE("Weyl inequalities on random pairs") {
    std::mt19937_64 seeds(13);
    const int n = 20;
    for (int trial = 0; trial < 5; ++trial) {
        const HermitianMatrix b = random_hermitian(n, seeds());
        const HermitianMatrix c = random_hermitian(n, seeds());
        HermitianMatrix sum(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) sum(i, j) = b(i, j) + c(i, j);
        const auto eb = eigenvalues_descending(b);
        const auto ec = eigenvalues_descending(c);
        const auto es = eigenvalues_descending(sum);
        // checked for 50 (j, k) pairs per trial, both directions (1-based)
        std::uniform_int_distribution<int> pick(1, n);
        for (int t = 0; t < 50; ++t) {
            const int j = pick(seeds), k = pick(seeds);
            if (j + k <= n + 1) {
                CHECK(es[static_cast<std::size_t>(j + k - 2)] <=
                      eb[static_cast<std::size_t>(j - 1)] + ec[static_cast<std::size_t>(k - 1)] + 1e-10);
            }
            if (j + k >= n + 1) {
                CHECK(eb[static_cast<std::size_t>(j - 1)] + ec[static_cast<std::size_t>(k - 1)] <=
                      es[static_cast<std::size_t>(j + k - n - 1)] + 1e-10);
            }
        }
    }
}

TEST_CASE("ks distance") {
    const FreeConvolution model(Measure::point_mass(0.0), 1.0);

    // eigenvalues planted exactly at the mid-quantiles
    const int n = 500;
    std::vector<double> planted(n);
    for (int j = 1; j <= n; ++j)
        planted[static_cast<std::size_t>(n - j)] = model.quantile((j - 0.5) / n);
    CHECK(ks_distance(planted, model) <= 1.0 / n + 1e-9);

    // one far outlier costs at least 1/n
    std::vector<double> shifted = planted;
    shifted[0] = 10.0;
    CHECK(ks_distance(shifted, model) >= 1.0 / n - 1e-12);
}

TEST_CASE("outlier check reads the predicted ranks") {
    const FreeConvolution model(Measure::point_mass(0.0), 1.0);
    const SpikeSet spikes({{2.0, 1}, {-2.0, 1}});
    const std::vector<double> bulk(98, 0.0);
    const auto preds = predict_spikes(model, spikes, 100, bulk);

    // spectrum with the limits planted exactly
    std::vector<double> eigs(100, 0.0);
    eigs[0] = 2.5;
    eigs[99] = -2.5;
    std::sort(eigs.begin(), eigs.end(), std::greater<>());
    const auto errs = check_outliers(eigs, preds, 0.1);
    REQUIRE(errs.size() == 2);
    for (const OutlierError& e : errs) {
        CHECK(e.abs_error == doctest::Approx(0.0));
        CHECK(e.match);
    }

    // rank beyond the matrix size
    std::vector<double> tiny(1, 0.0);
    CHECK_THROWS_AS((void)check_outliers(tiny, preds, 0.1), RankError);
}

TEST_CASE("separation check on the noise-free spectrum") {
    const FreeConvolution model(Measure::point_mass(0.0), 1.0);
    const SpikeSet spikes({{2.0, 1}});
    const std::vector<double> a_spec = build_perturbation(Measure::point_mass(0.0), 100, spikes);
    // no noise: the deformed spectrum is the perturbation spectrum itself,
    // pushed through nothing; counts match whenever the image gap clears it
    const std::vector<Interval> gaps = {{2.1, 2.4}};
    const auto checks = check_separation(a_spec, a_spec, model, spikes, gaps);
    REQUIRE(checks.size() == 1);
    CHECK(checks[0].a_prime == doctest::Approx(model.h_inverse(2.1)));
    CHECK(checks[0].b_prime == doctest::Approx(model.h_inverse(2.4)));
    CHECK(checks[0].count_a_above_b_prime == 1);
}

TEST_CASE("non-spiked extremes approach the support endpoints") {
    const Measure nu = Measure::uniform(-1.0, 1.0);
    const FreeConvolution model(nu, 1.0);
    const int n = 2000;
    const DeformedEnsemble ens{n, {EntryLaw::gaussian, 1.0}, build_perturbation(nu, n, SpikeSet()), 5150};
    const auto eigs = eigenvalues_descending(assemble(ens));
    CHECK(std::abs(eigs.front() - model.support()[0].hi) <= 0.15);
    CHECK(std::abs(eigs.back() - model.support()[0].lo) <= 0.15);
}

TEST_CASE("inclusion check counts distant eigenvalues") {
    const FreeConvolution model(Measure::point_mass(0.0), 1.0);
    const SpikeSet spikes({{2.0, 1}});
    const std::vector<double> bulk(99, 0.0);
    const auto preds = predict_spikes(model, spikes, 100, bulk);

    std::vector<double> eigs = {2.5, 1.9, 0.0, -1.5};
    CHECK(check_inclusion(eigs, model, preds, 0.2) == 0);

    const double edge = model.support()[0].lo;
    eigs.push_back(edge - 0.4); // one planted beyond 2 epsilon, away from the outlier
    CHECK(check_inclusion(eigs, model, preds, 0.2) == 1);
}
