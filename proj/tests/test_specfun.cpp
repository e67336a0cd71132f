#include "boundedsnr/errors.hpp"
#include "boundedsnr/specfun.hpp"
#include "doctest.h"
#include "oracles.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace snr;
using namespace snr::specfun;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

double oracle_kummer(double a, double b, double z) {
    return oracle::to_double(oracle::kummer(oracle::Big(a), oracle::Big(b), oracle::Big(z)));
}

}  // namespace

TEST_CASE("kummer_m: trivial values") {
    CHECK(kummer_m(13.5, 2.5, 0.0) == 1.0);
    CHECK(rel_err(kummer_m(1.0, 1.0, 1.0), std::exp(1.0)) < 1e-15);
}

TEST_CASE("kummer_m: frozen high-precision value") {
    // 50-digit term-by-term summation (oracles.hpp).
    constexpr double kM = 788.22293870832436;
    CHECK(rel_err(kummer_m(13.5, 2.5, 2.0), kM) < 1e-14);
    CHECK(rel_err(oracle_kummer(13.5, 2.5, 2.0), kM) < 1e-15);
}

TEST_CASE("kummer_m: agrees with the 50-digit oracle on random arguments") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ab(0.1, 30.0);
    std::uniform_real_distribution<double> zz(0.0, 60.0);
    for (int i = 0; i < 60; ++i) {
        const double a = ab(gen), b = ab(gen), z = zz(gen);
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(z);
        CHECK(rel_err(kummer_m(a, b, z), oracle_kummer(a, b, z)) < 1e-12);
    }
}

TEST_CASE("log_kummer_m reaches z = 700 without overflow") {
    const double a = 13.5, b = 2.5;
    CHECK_THROWS_AS(kummer_m(a, b, 700.0), EvaluationError);
    const auto big = oracle::kummer(oracle::Big(a), oracle::Big(b), oracle::Big(700));
    const double want = oracle::to_double(boost::multiprecision::log(big));
    CHECK(rel_err(log_kummer_m(a, b, 700.0), want) < 1e-13);
}

TEST_CASE("kummer_series: convergence bookkeeping") {
    SeriesOptions opts;
    const auto r = kummer_series(5.0, 1.5, 10.0, opts);
    CHECK(r.converged);
    CHECK(r.terms_used <= opts.max_terms);

    SeriesOptions tight;
    tight.max_terms = 5;
    const auto bad = kummer_series(5.0, 1.5, 10.0, tight);
    CHECK_FALSE(bad.converged);
    CHECK(bad.terms_used <= tight.max_terms);
    try {
        kummer_m(5.0, 1.5, 10.0, tight);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(e.a() == 5.0);
        CHECK(e.b() == 1.5);
        CHECK(e.z() == 10.0);
    }
}

TEST_CASE("kummer_m: domain errors") {
    CHECK_THROWS_AS(kummer_m(1.0, 1.0, -0.5), DomainError);
    CHECK_THROWS_AS(kummer_m(0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(kummer_m(1.0, -2.0, 1.0), DomainError);
    CHECK_THROWS_AS(kummer_ratio(1.0, 1.0, 1.0, 1.0, -1.0), DomainError);
}

TEST_CASE("kummer_m is >= 1 and strictly increasing in z") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ab(0.2, 20.0);
    for (int i = 0; i < 40; ++i) {
        const double a = ab(gen), b = ab(gen);
        double prev = kummer_m(a, b, 0.0);
        CHECK(prev == 1.0);
        for (double z = 0.25; z <= 30.0; z += 0.25) {
            const double cur = kummer_m(a, b, z);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("kummer_ratio: K_{a,b,0} decreases and vanishes") {
    const double a = 12.5, b = 2.5;
    auto K = [&](double z) { return kummer_ratio(a + 1.0, b + 1.0, a + 1.0, b, z); };
    CHECK(K(0.0) == 1.0);
    CHECK(kummer_ratio(3.0, 4.0, 7.0, 0.5, 0.0) == 1.0);
    double prev = K(0.0);
    for (int i = 1; i <= 100; ++i) {
        const double cur = K(0.5 * i);
        CHECK(cur < prev);
        prev = cur;
    }
    const double far = K(700.0);
    CHECK(far < 0.05);
    // Frozen 50-digit ratio M(13.5, 3.5, 700) / M(13.5, 2.5, 700).
    CHECK(rel_err(far, 0.0035096254940324479) < 1e-12);
}

TEST_CASE("kummer_ratio matches the quotient of oracle series") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ab(0.5, 25.0);
    std::uniform_real_distribution<double> zz(0.0, 700.0);
    for (int i = 0; i < 20; ++i) {
        const double a1 = ab(gen), b1 = ab(gen), a2 = ab(gen), b2 = ab(gen), z = zz(gen);
        const auto want = oracle::kummer(oracle::Big(a1), oracle::Big(b1), oracle::Big(z)) /
                          oracle::kummer(oracle::Big(a2), oracle::Big(b2), oracle::Big(z));
        CAPTURE(z);
        CHECK(rel_err(kummer_ratio(a1, b1, a2, b2, z), oracle::to_double(want)) < 1e-11);
    }
}

TEST_CASE("recurrence z M(a+1,b+1,z) = b [M(a+1,b,z) - M(a,b,z)]") {
    for (double a : {1.0, 5.0, 12.5}) {
        for (double b : {1.5, 2.5}) {
            for (double z : {0.1, 1.0, 10.0, 100.0}) {
                const double lhs = z * kummer_m(a + 1.0, b + 1.0, z);
                const double rhs = b * (kummer_m(a + 1.0, b, z) - kummer_m(a, b, z));
                CAPTURE(a);
                CAPTURE(b);
                CAPTURE(z);
                CHECK(rel_err(lhs, rhs) < 1e-10);
            }
        }
    }
}

TEST_CASE("H(a) = M(a, b+1, z) / M(a, b, z) decreases in a") {
    for (double b : {0.5, 1.5, 2.5, 4.0}) {
        for (double z : {0.5, 3.0, 20.0, 200.0}) {
            double prev = kummer_ratio(0.05, b + 1.0, 0.05, b, z);
            for (double a = 0.25; a <= 40.0; a += 0.25) {
                const double cur = kummer_ratio(a, b + 1.0, a, b, z);
                CHECK(cur < prev);
                prev = cur;
            }
        }
    }
}

TEST_CASE("bessel_i: trivial and closed-form values") {
    CHECK(bessel_i(0.0, 0.0) == 1.0);
    CHECK(bessel_i(1.5, 0.0) == 0.0);
    const double half = std::sqrt(2.0 / std::numbers::pi) * std::sinh(1.0);
    CHECK(rel_err(bessel_i(0.5, 1.0), half) < 1e-14);
    CHECK(rel_err(bessel_i(0.5, 1.0), 0.9376748882) < 1e-10);
    const double z = 3.7;
    CHECK(rel_err(bessel_i(-0.5, z), std::sqrt(2.0 / (std::numbers::pi * z)) * std::cosh(z)) <
          1e-14);
    CHECK_THROWS_AS(bessel_i(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(bessel_i(1.0, -1.0), DomainError);
}

TEST_CASE("bessel_i: frozen and oracle values") {
    constexpr double kI = 1.873278388837619;  // 50-digit series, nu = 3/2, z = 2.5
    CHECK(rel_err(bessel_i(1.5, 2.5), kI) < 1e-14);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> nus(-0.5, 10.0);
    std::uniform_real_distribution<double> zs(0.01, 80.0);
    for (int i = 0; i < 30; ++i) {
        const double nu = nus(gen), z = zs(gen);
        const double want =
            oracle::to_double(oracle::bessel_i(oracle::Big(nu), oracle::Big(z)));
        CHECK(rel_err(bessel_i(nu, z), want) < 1e-12);
    }
}

TEST_CASE("langevin_mgf: closed forms") {
    CHECK(langevin_mgf(0.0, 3.0, 4) == 1.0);
    CHECK(langevin_mgf(2.0, 0.0, 7) == 1.0);
    CHECK(rel_err(langevin_mgf(2.0, 1.0, 3), std::sinh(2.0) / 2.0) < 1e-14);
    CHECK(rel_err(langevin_mgf(1.0, 2.0, 3), 1.813430204) < 1e-9);
    CHECK(rel_err(langevin_mgf(1.3, 1.0, 1), std::cosh(1.3)) < 1e-14);
    CHECK(rel_err(langevin_mgf(1.3, 1.0, 1), 1.970914) < 1e-6);
}

TEST_CASE("langevin_mgf equals the normalised Bessel form") {
    for (int p = 1; p <= 8; ++p) {
        for (double w : {0.3, 1.0, 4.0, 15.0}) {
            const double nu = 0.5 * p - 1.0;
            const double bessel_form = std::tgamma(0.5 * p) * std::pow(2.0, nu) *
                                       bessel_i(nu, w) / std::pow(w, nu);
            CAPTURE(p);
            CAPTURE(w);
            CHECK(rel_err(langevin_mgf(w, 1.0, p), bessel_form) < 1e-12);
        }
    }
}

TEST_CASE("langevin_mgf agrees with Monte Carlo over the sphere") {
    std::mt19937_64 gen(20120601);
    std::normal_distribution<double> normal;
    constexpr int kDraws = 1'000'000;
    for (int p : {2, 3, 5}) {
        for (double w : {0.5, 2.0, 5.0}) {
            double mean = 0.0, m2 = 0.0;
            std::vector<double> u(p);
            for (int n = 1; n <= kDraws; ++n) {
                double norm2 = 0.0;
                for (double& v : u) {
                    v = normal(gen);
                    norm2 += v * v;
                }
                // y = w e_1 so y'U = w u_1 / ||u||.
                const double v = std::exp(w * u[0] / std::sqrt(norm2));
                const double d = v - mean;
                mean += d / n;
                m2 += d * (v - mean);
            }
            const double se = std::sqrt(m2 / (kDraws - 1) / kDraws);
            CAPTURE(p);
            CAPTURE(w);
            CHECK(std::abs(mean - langevin_mgf(w, 1.0, p)) <= 4.0 * se);
        }
    }
}

TEST_CASE("integral identity linking I_nu and the Kummer function") {
    struct Tuple {
        double alpha, nu, mu, T;
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    for (const Tuple& c : {Tuple{5.0, 1.5, 2.0, 3.0}, Tuple{3.0, 0.5, 1.0, 2.0},
                           Tuple{4.5, 2.5, 3.0, 5.0}}) {
        auto integrand = [&](double A) {
            if (A <= 0.0) return 0.0;
            // I_nu(x) < e^x, so the integrand is negligible once this exponent underflows.
            if (-c.T / (2.0 * A) + c.mu / std::sqrt(A) < -700.0) return 0.0;
            return std::pow(A, -c.alpha) * std::exp(-c.T / (2.0 * A)) *
                   bessel_i(c.nu, c.mu / std::sqrt(A));
        };
        const double lhs = integrator.integrate(integrand, 1e-12);
        const double zeta = c.mu * c.mu / (2.0 * c.T);
        const double rhs = std::exp(log_gamma(c.alpha + 0.5 * c.nu - 1.0) - log_gamma(c.nu + 1.0)) *
                           std::pow(zeta, 0.5 * c.nu) * std::pow(2.0 / c.T, c.alpha - 1.0) *
                           kummer_m(c.alpha + 0.5 * c.nu - 1.0, c.nu + 1.0, zeta);
        CAPTURE(c.alpha);
        CAPTURE(c.nu);
        CHECK(rel_err(lhs, rhs) < 1e-6);
    }
}
