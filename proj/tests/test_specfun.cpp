#include <cmath>
#include <stdexcept>
#include <random>

#include <doctest.h>

#include "sideband/specfun.hpp"

using namespace sideband::specfun;

TEST_CASE("digamma anchors and recurrence") {
    const double euler = 0.57721566490153286;
    CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-14));
    CHECK(digamma(0.5) == doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-14));
    // psi(13) = -euler + H_12, H_12 = 86021/27720
    CHECK(digamma(13.0) == doctest::Approx(-euler + 86021.0 / 27720.0).epsilon(1e-14));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.05, 40.0);
    for (int i = 0; i < 200; ++i) {
        const double x = dist(rng);
        CHECK(digamma(x + 1.0) - digamma(x)
              == doctest::Approx(1.0 / x).epsilon(1e-12));
    }
    CHECK_THROWS_AS(digamma(0.0), std::domain_error);
}

TEST_CASE("trigamma anchors and recurrence") {
    const double pi = std::acos(-1.0);
    CHECK(trigamma(1.0) == doctest::Approx(pi * pi / 6.0).epsilon(1e-14));
    CHECK(trigamma(0.5) == doctest::Approx(pi * pi / 2.0).epsilon(1e-14));

    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(0.05, 40.0);
    for (int i = 0; i < 200; ++i) {
        const double x = dist(rng);
        CHECK(trigamma(x) - trigamma(x + 1.0)
              == doctest::Approx(1.0 / (x * x)).epsilon(1e-12));
    }
}

TEST_CASE("signed log gamma covers negative arguments") {
    const double sqrt_pi = std::sqrt(std::acos(-1.0));
    const SignedLog a = lgamma_signed(-0.5);  // Gamma(-1/2) = -2 sqrt(pi)
    CHECK(a.sign == -1);
    CHECK(std::exp(a.log_abs) == doctest::Approx(2.0 * sqrt_pi).epsilon(1e-14));
    const SignedLog b = lgamma_signed(-1.5);  // Gamma(-3/2) = 4 sqrt(pi)/3
    CHECK(b.sign == 1);
    CHECK(std::exp(b.log_abs) == doctest::Approx(4.0 * sqrt_pi / 3.0).epsilon(1e-14));
    CHECK(lgamma_signed(0.0).sign == 0);
    CHECK(lgamma_signed(-3.0).sign == 0);
}

TEST_CASE("signed log binomial") {
    const SignedLog a = log_binomial_signed(10.0, 3);
    CHECK(a.sign == 1);
    CHECK(std::exp(a.log_abs) == doctest::Approx(120.0).epsilon(1e-13));
    // binom(2.5, 4) = 2.5*1.5*0.5*(-0.5)/24
    const SignedLog b = log_binomial_signed(2.5, 4);
    CHECK(b.sign == -1);
    CHECK(std::exp(b.log_abs) == doctest::Approx(0.0390625).epsilon(1e-13));
    // integer c below k: exact zero through the Gamma pole
    CHECK(log_binomial_signed(1.0, 5).sign == 0);
}

TEST_CASE("Gauss-Legendre integrates high-degree polynomials exactly") {
    const QuadratureRule rule = gauss_legendre(16);
    double total = 0.0, x10 = 0.0, x31 = 0.0;
    for (int i = 0; i < 16; ++i) {
        total += rule.weights[i];
        x10 += rule.weights[i] * std::pow(rule.nodes[i], 10);
        x31 += rule.weights[i] * std::pow(rule.nodes[i], 31);
        CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[15 - i]).epsilon(1e-14));
    }
    CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x10 == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
    CHECK(std::abs(x31) < 1e-14);  // odd power
}
