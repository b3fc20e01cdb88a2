#include "sideband/linalg.hpp"

#include <cmath>

namespace sideband {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int dim) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

Eigen::MatrixXcd left_mul(const Eigen::MatrixXcd& a) {
    return kron(Eigen::MatrixXcd::Identity(a.rows(), a.cols()), a);
}

Eigen::MatrixXcd right_mul(const Eigen::MatrixXcd& b) {
    return kron(b.transpose(), Eigen::MatrixXcd::Identity(b.rows(), b.cols()));
}

Eigen::RowVectorXcd trace_functional(int dim) {
    Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(dim * dim);
    for (int i = 0; i < dim; ++i)
        t(i + dim * i) = 1.0;
    return t;
}

double compensated_sum(std::span<const double> terms) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : terms) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace sideband
