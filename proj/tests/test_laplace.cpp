#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gla/dynsys.hpp"
#include "gla/laplace.hpp"

using namespace gla;

namespace {

// Brute-force mean of mu^k / lambda^k, the independent oracle for geometric
// contamination.
cplx geometric_mean(cplx mu, cplx lambda, std::size_t n) {
    KahanSum s;
    cplx q(1.0, 0.0);
    const cplx ratio = mu / lambda;
    for (std::size_t k = 0; k < n; ++k) {
        s.add(q);
        q *= ratio;
    }
    return s.value() / static_cast<double>(n);
}

std::vector<cplx> eigenfunction_samples(cplx lambda, cplx c, std::size_t n) {
    std::vector<cplx> out(n);
    ScaledCplx p;
    for (std::size_t k = 0; k < n; ++k) {
        if (k != 0) p *= lambda;
        out[k] = p.times(c);
    }
    return out;
}

}  // namespace

TEST_CASE("laplace_average on exact eigenfunction data") {
    const cplx c(0.7, -0.3);
    for (std::size_t n : {std::size_t(1), std::size_t(10), std::size_t(1000)}) {
        const auto samples = eigenfunction_samples(cplx(0.9, 0), c, n);
        const cplx avg = laplace_average(samples, cplx(0.9, 0));
        CHECK(std::abs(avg - c) <= 1e-12 * std::abs(c));
    }
    // Complex eigenvalue.
    for (std::size_t n : {std::size_t(10), std::size_t(1000)}) {
        const cplx lambda(0.6, 0.5);
        const auto samples = eigenfunction_samples(lambda, c, n);
        const cplx avg = laplace_average(samples, lambda);
        CHECK(std::abs(avg - c) <= 1e-12 * std::abs(c));
    }
    // Past n ~ 7000 the raw powers leave the double range; scaled samples
    // carry the exponent and the weighted terms stay exact.
    for (std::size_t n : {std::size_t(100000)}) {
        std::vector<ComplexSample> samples(n);
        for (std::size_t k = 0; k < n; ++k) {
            samples[k] = scaled_pow(cplx(0.9, 0), static_cast<std::int64_t>(k));
            samples[k] *= c;
        }
        const cplx avg = laplace_average(samples, cplx(0.9, 0));
        CHECK(std::abs(avg - c) <= 1e-12 * std::abs(c));
    }
}

TEST_CASE("laplace_average along a real trajectory") {
    // Samples from the actual dynamics rather than synthetic powers; n kept
    // inside the range where the iterates remain normal doubles.
    auto sys = DiscreteLinearSystem::diagonal(
        (Eigen::VectorXcd(2) << cplx(0.9, 0), cplx(0.5, 0)).finished());
    State x0(2);
    x0 << cplx(1, 0), cplx(1, 0);
    for (std::size_t n : {std::size_t(1), std::size_t(10), std::size_t(1000),
                          std::size_t(5000)}) {
        const Trajectory t = trajectory(sys, x0, n);
        std::vector<cplx> samples(n);
        for (std::size_t k = 0; k < n; ++k) samples[k] = t.states[k][0];  // phi_1 for diag
        const cplx avg = laplace_average(samples, cplx(0.9, 0));
        CHECK(std::abs(avg - cplx(1, 0)) <= 1e-12);
    }
}

TEST_CASE("laplace_average geometric cross term") {
    // samples = mu^k with mu = 0.5 averaged at lambda = 0.9: the closed form
    // is (1/n)(1-(5/9)^n)/(1-5/9) ~ 0.0225 at n = 100.
    const std::size_t n = 100;
    const auto samples = eigenfunction_samples(cplx(0.5, 0), cplx(1, 0), n);
    const cplx avg = laplace_average(samples, cplx(0.9, 0));
    const cplx oracle = geometric_mean(cplx(0.5, 0), cplx(0.9, 0), n);
    CHECK(std::abs(avg - oracle) < 1e-14);
    CHECK(avg.real() == doctest::Approx(0.0225).epsilon(1e-3));
}

TEST_CASE("laplace_average unimodular bound") {
    // samples = 1, lambda = e^{i theta}: |avg| <= 2 / (n |1 - e^{-i theta}|).
    const std::size_t n = 628;
    const double theta = 1.0;
    const cplx lambda = std::polar(1.0, theta);
    const std::vector<cplx> samples(n, cplx(1, 0));
    const cplx avg = laplace_average(samples, lambda);
    const double bound =
        2.0 / (static_cast<double>(n) * std::abs(cplx(1, 0) - std::polar(1.0, -theta)));
    CHECK(std::abs(avg) <= bound);
}

TEST_CASE("laplace_average cesaro bound law") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> mag(0.05, 0.95);
    std::uniform_real_distribution<double> angle(0.0, 6.28);
    for (int trial = 0; trial < 20; ++trial) {
        const cplx lambda = std::polar(mag(rng) * 0.5 + 0.5, angle(rng));
        const cplx mu = std::polar(mag(rng) * std::abs(lambda) * 0.9, angle(rng));
        const double r = std::abs(mu / lambda);
        for (std::size_t n : {std::size_t(100), std::size_t(10000)}) {
            const auto samples = eigenfunction_samples(mu, cplx(1, 0), n);
            const cplx avg = laplace_average(samples, lambda);
            const double bound =
                (1.0 + std::pow(r, static_cast<double>(n))) / (1.0 - r) / static_cast<double>(n);
            CHECK(std::abs(avg) <= bound * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("laplace_average errors") {
    const std::vector<cplx> ones(600, cplx(1, 0));
    CHECK_THROWS_AS(laplace_average(ones, cplx(0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(laplace_average(std::span<const cplx>{}, cplx(1, 0)),
                    std::invalid_argument);

    // Non-decaying samples at |lambda| < 1: term 2^k crosses the 1e150 guard
    // at k = ceil(log2 1e150) = 499.
    try {
        laplace_average(ones, cplx(0.5, 0));
        FAIL("expected weight overflow");
    } catch (const NumericError& e) {
        CHECK(e.step() == 499);
    }
}

TEST_CASE("continuous_laplace_average") {
    SUBCASE("constant integrand collapses to the base value") {
        // f(t) = c e^{z t} averaged at exponent z: every integrand value is c.
        const cplx z(-1.0, 1.0);
        const cplx c(0.4, 0.2);
        const double dt = 1e-3;
        std::vector<TimedSample> samples;
        for (int j = 0; j <= 10000; ++j) {
            const double t = j * dt;
            samples.push_back({t, c * std::exp(z * t)});
        }
        const cplx avg = continuous_laplace_average(samples, z);
        CHECK(std::abs(avg - c) < 1e-12);
    }

    SUBCASE("quadrature of a decaying component is O(1/alpha)") {
        // f(t) = e^{-t}, exponent 0: alpha^{-1} int_0^alpha e^{-t} dt.
        const double dt = 1e-4, alpha = 5.0;
        std::vector<TimedSample> samples;
        for (int j = 0; j <= static_cast<int>(alpha / dt); ++j)
            samples.push_back({j * dt, cplx(std::exp(-j * dt), 0)});
        const cplx avg = continuous_laplace_average(samples, cplx(0, 0));
        const double oracle = (1.0 - std::exp(-alpha)) / alpha;
        CHECK(std::abs(avg.real() - oracle) < 1e-8);  // trapezoid O(dt^2)
    }

    SUBCASE("divergence diagnostic") {
        // Growing integrand: the target modulus sits below the sample growth.
        const double dt = 0.01;
        std::vector<TimedSample> samples;
        for (int j = 0; j <= 2000; ++j)
            samples.push_back({j * dt, cplx(std::exp(j * dt), 0)});
        CHECK_THROWS_AS(continuous_laplace_average(samples, cplx(0, 0)), NumericError);
    }

    SUBCASE("grid validation") {
        std::vector<TimedSample> one = {{0.0, cplx(1, 0)}};
        CHECK_THROWS_AS(continuous_laplace_average(one, cplx(1, 0)), std::invalid_argument);
        std::vector<TimedSample> nonuniform = {
            {0.0, cplx(1, 0)}, {0.1, cplx(1, 0)}, {0.3, cplx(1, 0)}};
        CHECK_THROWS_AS(continuous_laplace_average(nonuniform, cplx(1, 0)),
                        std::invalid_argument);
        std::vector<TimedSample> late = {{1.0, cplx(1, 0)}, {1.1, cplx(1, 0)}};
        CHECK_THROWS_AS(continuous_laplace_average(late, cplx(1, 0)), std::invalid_argument);
    }
}
