#pragma once

#include <utility>
#include <vector>

namespace sideband::specfun {

// log|Gamma(x)| together with the sign of Gamma(x).
// Gamma-function ratios in the Morse matrix elements are assembled from
// these in log space; Gamma(2a - n) overflows double precision already
// for a of order 90, the logs never do.
struct SignedLog {
    double log_abs;
    int sign;  // +1 or -1; 0 marks a pole (non-positive integer argument)
};

SignedLog lgamma_signed(double x);

// log|binomial(c, k)| with sign, for real c and integer k >= 0.
SignedLog log_binomial_signed(double c, int k);

// Digamma psi^(0) and trigamma psi^(1) for x > 0.
double digamma(double x);
double trigamma(double x);

// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_legendre(int n);

}  // namespace sideband::specfun
