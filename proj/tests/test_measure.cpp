#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "freeconv/measure.hpp"
#include "support/quad_oracle.hpp"

using namespace freeconv;
using std::complex;

namespace {

Measure two_atoms() { return Measure({Atom{-1.0, 0.5}, Atom{1.0, 0.5}}); }

} // namespace

TEST_CASE("construction validates the invariants") {
    CHECK_THROWS_AS(Measure({Atom{0.0, 0.5}}), InvariantError);              // mass 0.5
    CHECK_THROWS_AS(Measure({Atom{0.0, -1.0}, Atom{1.0, 2.0}}), InvariantError);
    CHECK_THROWS_AS(Measure({UniformPiece{1.0, 1.0, 1.0}}), InvariantError); // a == b
    CHECK_THROWS_AS(Measure({}), InvariantError);
    CHECK_NOTHROW(Measure({Atom{0.0, 0.5}, UniformPiece{-1.0, 1.0, 0.5}}));
}

TEST_CASE("stieltjes transform closed forms") {
    // point mass at 0: g(z) = 1/z
    const Measure delta0 = Measure::point_mass(0.0);
    const complex<double> gi = delta0.stieltjes(complex<double>(0.0, 1.0));
    CHECK(std::abs(gi - complex<double>(0.0, -1.0)) < 1e-15);

    // half-half atoms at -1, 1 evaluated at z = 2: (1/2)(1/3 + 1/1) = 2/3
    CHECK(two_atoms().stieltjes(2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    // uniform[-1,1] at sqrt(2): log(1 + sqrt 2), cross-checked by quadrature
    const Measure unif = Measure::uniform(-1.0, 1.0);
    const double z = std::sqrt(2.0);
    const double expected = std::log(1.0 + std::sqrt(2.0));
    CHECK(unif.stieltjes(z) == doctest::Approx(expected).epsilon(1e-12));
    const double quad = oracle::integrate_measure(unif, [&](double x) { return 1.0 / (z - x); });
    CHECK(unif.stieltjes(z) == doctest::Approx(quad).epsilon(1e-11));

    CHECK_THROWS_AS((void)unif.stieltjes(0.5), DomainError);
    CHECK_THROWS_AS((void)delta0.stieltjes(0.0), DomainError);
}

TEST_CASE("stieltjes derivative closed forms") {
    CHECK(Measure::point_mass(0.0).stieltjes_derivative(2.0) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(Measure::uniform(-1.0, 1.0).stieltjes_derivative(std::sqrt(2.0)) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(two_atoms().stieltjes_derivative(3.0) == doctest::Approx(-0.15625).epsilon(1e-14));
    CHECK_THROWS_AS((void)two_atoms().stieltjes_derivative(1.0), DomainError);
}

TEST_CASE("inv_square_mass including the infinite sentinel") {
    CHECK(Measure::point_mass(0.0).inv_square_mass(2.0, 0.0) == doctest::Approx(0.25));
    CHECK(Measure::uniform(-1.0, 1.0).inv_square_mass(std::sqrt(2.0), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(two_atoms().inv_square_mass(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));

    CHECK(std::isinf(Measure::point_mass(0.0).inv_square_mass(0.0, 0.0)));
    CHECK(std::isinf(Measure::uniform(-1.0, 1.0).inv_square_mass(0.3, 0.0)));
    CHECK(std::isinf(Measure::uniform(-1.0, 1.0).inv_square_mass(1.0, 0.0))); // endpoint
    CHECK_THROWS_AS((void)two_atoms().inv_square_mass(0.0, -1.0), RangeError);
}

TEST_CASE("inv_square_mass strictly decreases in v") {
    const Measure nu({Atom{-0.5, 0.25}, UniformPiece{0.0, 2.0, 0.75}});
    for (double u : {-2.0, -0.5, 0.7, 1.0, 3.5}) {
        double prev = nu.inv_square_mass(u, 1e-3);
        for (int k = 1; k <= 40; ++k) {
            const double v = 1e-3 + 0.1 * k;
            const double cur = nu.inv_square_mass(u, v);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("quadrature consistency of every transform at random points") {
    const Measure nu({Atom{-1.5, 0.2}, UniformPiece{-1.0, 0.5, 0.5}, UniformPiece{1.0, 2.0, 0.3}});
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> pick(-4.0, 4.0);
    int tested = 0;
    while (tested < 20) {
        const double u = pick(gen);
        bool clear = true;
        for (const Interval& c : nu.support_components())
            if (u > c.lo - 0.05 && u < c.hi + 0.05) clear = false;
        if (!clear) continue;
        ++tested;
        const double g = oracle::integrate_measure(nu, [&](double x) { return 1.0 / (u - x); });
        const double gp = oracle::integrate_measure(nu, [&](double x) { return -1.0 / ((u - x) * (u - x)); });
        const double v = 0.3;
        const double ism = oracle::integrate_measure(
            nu, [&](double x) { return 1.0 / ((u - x) * (u - x) + v * v); });
        const double cr = oracle::integrate_measure(
            nu, [&](double x) { return (u - x) / ((u - x) * (u - x) + v * v); });
        CHECK(nu.stieltjes(u) == doctest::Approx(g).epsilon(1e-9));
        CHECK(nu.stieltjes_derivative(u) == doctest::Approx(gp).epsilon(1e-9));
        CHECK(nu.inv_square_mass(u, v) == doctest::Approx(ism).epsilon(1e-9));
        CHECK(nu.cauchy_real(u, v) == doctest::Approx(cr).epsilon(1e-9));
    }
}

TEST_CASE("normalization: z g(z) -> 1 far from the support") {
    const Measure nu({Atom{-1.5, 0.2}, UniformPiece{-1.0, 0.5, 0.5}, UniformPiece{1.0, 2.0, 0.3}});
    const complex<double> z(0.0, 1e6);
    CHECK(std::abs(z * nu.stieltjes(z) - 1.0) < 1e-5);
}

TEST_CASE("upper half-plane maps to the lower half-plane") {
    const Measure nu({Atom{-1.5, 0.2}, UniformPiece{-1.0, 0.5, 0.5}, UniformPiece{1.0, 2.0, 0.3}});
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> re(-5.0, 5.0), im(1e-6, 10.0);
    for (int k = 0; k < 200; ++k) {
        const complex<double> z(re(gen), im(gen));
        CHECK(nu.stieltjes(z).imag() < 0.0);
    }
}

TEST_CASE("cdf and quantile") {
    const Measure unif = Measure::uniform(-1.0, 1.0);
    CHECK(unif.quantile(0.75) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(two_atoms().quantile(0.5) == -1.0); // generalized inverse at a jump
    const Measure delta0 = Measure::point_mass(0.0);
    for (double a : {1e-9, 0.3, 1.0}) CHECK(delta0.quantile(a) == 0.0);
    CHECK(delta0.quantile(0.0) == 0.0);

    CHECK_THROWS_AS((void)unif.quantile(-0.1), RangeError);
    CHECK_THROWS_AS((void)unif.quantile(1.1), RangeError);

    // right-continuity and jumps
    CHECK(two_atoms().cdf(-1.0) == doctest::Approx(0.5));
    CHECK(two_atoms().cdf_left(-1.0) == doctest::Approx(0.0));
    CHECK(two_atoms().cdf(0.999) == doctest::Approx(0.5));
    CHECK(two_atoms().cdf(1.0) == doctest::Approx(1.0));
}

TEST_CASE("cdf/quantile Galois pair on random inputs") {
    const Measure nu({Atom{-1.0, 0.3}, UniformPiece{-0.5, 0.5, 0.4}, Atom{2.0, 0.3}});
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    // quantile(0) is pinned to the left support endpoint, so the second
    // inequality is meaningful from there on
    std::uniform_real_distribution<double> ux(nu.support_min(), 3.0);
    for (int k = 0; k < 100; ++k) {
        const double a = ua(gen);
        const double x = ux(gen);
        CHECK(nu.cdf(nu.quantile(a)) >= a - 1e-12);
        CHECK(nu.quantile(nu.cdf(x)) <= x + 1e-12);
    }
}

TEST_CASE("support components merge overlaps") {
    const Measure m1 = two_atoms();
    REQUIRE(m1.support_components().size() == 2);
    CHECK(m1.support_components()[0].lo == -1.0);
    CHECK(m1.support_components()[0].hi == -1.0);
    CHECK(m1.support_components()[1].lo == 1.0);

    const Measure m2({UniformPiece{-1.0, 1.0, 0.5}, Atom{3.0, 0.5}});
    REQUIRE(m2.support_components().size() == 2);
    CHECK(m2.support_components()[0].lo == -1.0);
    CHECK(m2.support_components()[0].hi == 1.0);
    CHECK(m2.support_components()[1].lo == 3.0);

    const Measure m3({UniformPiece{0.0, 1.0, 0.5}, UniformPiece{0.5, 2.0, 0.5}});
    REQUIRE(m3.support_components().size() == 1);
    CHECK(m3.support_components()[0].lo == 0.0);
    CHECK(m3.support_components()[0].hi == 2.0);
}

TEST_CASE("quantile-midpoint discretization stays in the support") {
    const auto q1 = Measure::uniform(0.0, 1.0).discretize_quantiles(2);
    REQUIRE(q1.size() == 2);
    CHECK(q1[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(q1[1] == doctest::Approx(0.75).epsilon(1e-14));

    const auto q2 = Measure::point_mass(0.0).discretize_quantiles(5);
    for (double b : q2) CHECK(b == 0.0);

    const auto q3 = two_atoms().discretize_quantiles(4);
    CHECK(q3 == std::vector<double>{-1.0, -1.0, 1.0, 1.0});

    const Measure mixed({Atom{-1.0, 0.3}, UniformPiece{0.0, 1.0, 0.7}});
    for (double b : mixed.discretize_quantiles(37)) CHECK(mixed.in_support(b));
    CHECK_THROWS_AS((void)mixed.discretize_quantiles(0), RangeError);
}

TEST_CASE("mass_between") {
    const Measure nu({Atom{-3.0, 0.25}, Atom{3.0, 0.75}});
    CHECK(nu.mass_between(-4.0, 0.0) == doctest::Approx(0.25));
    CHECK(nu.mass_between(-3.0, 3.0) == doctest::Approx(1.0));
    CHECK(nu.mass_between(0.0, 2.0) == doctest::Approx(0.0));
    const Measure u = Measure::uniform(0.0, 2.0);
    CHECK(u.mass_between(0.5, 1.0) == doctest::Approx(0.25));
}
