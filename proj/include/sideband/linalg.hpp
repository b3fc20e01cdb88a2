#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace sideband {

using complex = std::complex<double>;

// Kronecker product, standard convention:
// kron(A, B)[i*p + k, j*q + l] = A(i, j) * B(k, l) for B of size p x q.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Column-major vectorization of a density matrix and its inverse.
// With this convention vec(A rho B) = kron(B^T, A) vec(rho).
Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int dim);

// Superoperators for left and right multiplication on vectorized operators.
Eigen::MatrixXcd left_mul(const Eigen::MatrixXcd& a);
Eigen::MatrixXcd right_mul(const Eigen::MatrixXcd& b);

// Row vector representing the trace functional on vectorized operators.
Eigen::RowVectorXcd trace_functional(int dim);

// Neumaier compensated summation.
double compensated_sum(std::span<const double> terms);

}  // namespace sideband
