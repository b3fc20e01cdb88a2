#include "sideband/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sideband::specfun {

SignedLog lgamma_signed(double x) {
    if (x > 0.0)
        return {std::lgamma(x), 1};
    if (x == std::floor(x))
        return {std::numeric_limits<double>::infinity(), 0};
    // Gamma alternates sign between consecutive negative integers:
    // positive on (-2,-1), negative on (-1,0), and so on.
    const long m = static_cast<long>(std::floor(x));
    const int sign = (m % 2 == 0) ? 1 : -1;
    return {std::lgamma(x), sign};
}

SignedLog log_binomial_signed(double c, int k) {
    if (k < 0)
        throw std::invalid_argument("log_binomial_signed: k must be >= 0");
    const SignedLog num = lgamma_signed(c + 1.0);
    const SignedLog den1 = lgamma_signed(static_cast<double>(k) + 1.0);
    const SignedLog den2 = lgamma_signed(c - k + 1.0);
    if (den2.sign == 0)  // pole in the denominator: binomial vanishes
        return {-std::numeric_limits<double>::infinity(), 0};
    if (num.sign == 0)
        throw std::domain_error("log_binomial_signed: c is a negative integer");
    return {num.log_abs - den1.log_abs - den2.log_abs,
            num.sign * den1.sign * den2.sign};
}

double digamma(double x) {
    if (x <= 0.0)
        throw std::domain_error("digamma: argument must be positive");
    // Recurrence psi(x) = psi(x+1) - 1/x up to the asymptotic region,
    // then the standard Bernoulli series.
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = std::log(x) - 0.5 * inv;
    // B_2n / (2n x^(2n)) for 2n = 2, 4, ..., 14
    series -= inv2 * (1.0 / 12.0
              - inv2 * (1.0 / 120.0
              - inv2 * (1.0 / 252.0
              - inv2 * (1.0 / 240.0
              - inv2 * (1.0 / 132.0
              - inv2 * (691.0 / 32760.0
              - inv2 * (1.0 / 12.0)))))));
    return acc + series;
}

double trigamma(double x) {
    if (x <= 0.0)
        throw std::domain_error("trigamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // 1/x + 1/(2x^2) + sum B_2n / x^(2n+1)
    double series = inv + 0.5 * inv2;
    series += inv * inv2 * (1.0 / 6.0
              - inv2 * (1.0 / 30.0
              - inv2 * (1.0 / 42.0
              - inv2 * (1.0 / 30.0
              - inv2 * (5.0 / 66.0
              - inv2 * (691.0 / 2730.0
              - inv2 * (7.0 / 6.0)))))));
    return acc + series;
}

QuadratureRule gauss_legendre(int n) {
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = std::acos(-1.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton iteration on P_n, Chebyshev-like initial guess.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace sideband::specfun
