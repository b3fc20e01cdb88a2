#include "sideband/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sideband/linalg.hpp"
#include "sideband/parallel.hpp"
#include "sideband/specfun.hpp"

namespace sideband {

namespace {

constexpr complex kI{0.0, 1.0};
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr int kMaxLevels = 12;

struct ProductOperators {
    int dim = 0;
    Eigen::MatrixXcd sigma_minus, sigma_plus, proj_e, x, identity;
};

ProductOperators lift(const MotionalBasis& basis) {
    const int n = basis.n_levels;
    ProductOperators ops;
    ops.dim = 2 * n;
    const Eigen::MatrixXcd id_e = Eigen::MatrixXcd::Identity(n, n);
    Eigen::Matrix2cd sm = Eigen::Matrix2cd::Zero(), sp = Eigen::Matrix2cd::Zero(),
                     pe = Eigen::Matrix2cd::Zero();
    sm(0, 1) = 1.0;
    sp(1, 0) = 1.0;
    pe(1, 1) = 1.0;
    ops.sigma_minus = kron(sm, id_e);
    ops.sigma_plus = kron(sp, id_e);
    ops.proj_e = kron(pe, id_e);
    ops.x = kron(Eigen::Matrix2cd::Identity(), basis.x_elem.cast<complex>());
    ops.identity = Eigen::MatrixXcd::Identity(ops.dim, ops.dim);
    return ops;
}

Eigen::MatrixXcd commutator_super(const Eigen::MatrixXcd& h) {
    return -kI * (left_mul(h) - right_mul(h));
}

Eigen::MatrixXcd lindblad_super(const Eigen::MatrixXcd& jump) {
    const Eigen::MatrixXcd jdj = jump.adjoint() * jump;
    return 2.0 * kron(jump.adjoint().transpose(), jump) - left_mul(jdj) - right_mul(jdj);
}

double trace_column_defect(const Eigen::MatrixXcd& op, int dim) {
    const Eigen::RowVectorXcd t = trace_functional(dim);
    return (t * op).cwiseAbs().maxCoeff();
}

void guard_levels(const MotionalBasis& basis) {
    if (basis.n_levels > kMaxLevels)
        throw std::invalid_argument("oracle: n_levels > 12 exceeds the dense dimension guard");
}

}  // namespace

FullLiouvillian assemble_full(const MotionalBasis& basis, const LaserParams& p,
                              std::array<bool, 3> orders) {
    guard_levels(basis);
    const ProductOperators ops = lift(basis);
    const int dim = ops.dim;

    FullLiouvillian out;
    out.n_levels = basis.n_levels;
    out.params = p;
    out.x_elem = basis.x_elem;
    out.orders = orders;
    out.op = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);

    Eigen::MatrixXcd h_ext = Eigen::MatrixXcd::Zero(dim, dim);
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < basis.n_levels; ++k)
            h_ext(s * basis.n_levels + k, s * basis.n_levels + k) = basis.energies[k];

    if (orders[0]) {
        const Eigen::MatrixXcd h0 = -p.delta * ops.proj_e
                                    + (p.omega / 2.0) * (ops.sigma_plus + ops.sigma_minus)
                                    + h_ext;
        out.op += commutator_super(h0);
        out.op += (p.gamma / 2.0) * lindblad_super(ops.sigma_minus);
    }
    if (orders[1]) {
        const Eigen::MatrixXcd h1 = kI * (p.omega / 2.0) * p.eta * p.cos_phi
                                    * (ops.sigma_plus - ops.sigma_minus) * ops.x;
        out.op += commutator_super(h1);
    }
    if (orders[2]) {
        const Eigen::MatrixXcd x2 = ops.x * ops.x;
        const Eigen::MatrixXcd h2 = -(p.omega / 4.0) * p.eta * p.eta
                                    * p.cos_phi * p.cos_phi
                                    * (ops.sigma_plus + ops.sigma_minus) * x2;
        out.op += commutator_super(h2);
        // recoil term: alpha (Gamma/2) eta^2 sigma_- D[X] rho sigma_+
        const Eigen::MatrixXcd sx = ops.sigma_minus * ops.x;
        const Eigen::MatrixXcd sx2 = ops.sigma_minus * x2;
        Eigen::MatrixXcd recoil = 2.0 * kron((ops.sigma_plus * ops.x).transpose(), sx)
                                  - kron(ops.sigma_plus.transpose(), sx2)
                                  - kron((ops.sigma_plus * x2).transpose(), ops.sigma_minus);
        out.op += p.alpha * (p.gamma / 2.0) * p.eta * p.eta * recoil;
    }

    out.trace_defect = trace_column_defect(out.op, dim);
    const double scale = std::max(out.op.cwiseAbs().maxCoeff(), 1.0);
    if (out.trace_defect > 1e-12 * scale)
        throw std::runtime_error("assemble_full: trace preservation violated at assembly");
    return out;
}

FullSteadyState full_steady_state(const FullLiouvillian& liouville) {
    const int dim = 2 * liouville.n_levels;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(liouville.op);
    if (lu.dimensionOfKernel() != 1)
        throw std::runtime_error("full_steady_state: kernel dimension is "
                                 + std::to_string(lu.dimensionOfKernel())
                                 + ", expected 1 (is eta > 0?)");
    const Eigen::VectorXcd kernel = lu.kernel().col(0);
    Eigen::MatrixXcd rho = unvec(kernel, dim);
    const complex tr = rho.trace();
    if (std::abs(tr) < 1e-14)
        throw std::runtime_error("full_steady_state: traceless kernel vector");
    rho /= tr;

    FullSteadyState out;
    out.hermiticity_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    out.rho = rho;
    out.residual = (liouville.op * vec(rho)).cwiseAbs().maxCoeff()
                   / liouville.op.cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    return out;
}

std::vector<double> motional_populations(const Eigen::MatrixXcd& rho, int n_levels) {
    std::vector<double> p(n_levels, 0.0);
    for (int k = 0; k < n_levels; ++k)
        p[k] = (rho(k, k) + rho(n_levels + k, n_levels + k)).real();
    return p;
}

Eigen::Matrix2cd internal_marginal(const Eigen::MatrixXcd& rho, int n_levels) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            for (int k = 0; k < n_levels; ++k)
                m(s, t) += rho(s * n_levels + k, t * n_levels + k);
    return m;
}

namespace {

struct RegressionSetup {
    Eigen::VectorXcd source;     // vec(D_- rho_st)
    Eigen::RowVectorXcd probe;   // row functional Tr{D_+ . }
};

RegressionSetup regression_setup(const FullLiouvillian& liouville,
                                 const Eigen::MatrixXcd& steady) {
    const int n = liouville.n_levels;
    const int dim = 2 * n;
    const LaserParams& p = liouville.params;
    Eigen::Matrix2cd sm = Eigen::Matrix2cd::Zero(), sp = Eigen::Matrix2cd::Zero();
    sm(0, 1) = 1.0;
    sp(1, 0) = 1.0;
    const Eigen::MatrixXcd smf = kron(sm, Eigen::MatrixXcd::Identity(n, n));
    const Eigen::MatrixXcd spf = kron(sp, Eigen::MatrixXcd::Identity(n, n));
    const Eigen::MatrixXcd xf =
        kron(Eigen::Matrix2cd::Identity(), liouville.x_elem.cast<complex>());
    const complex rec = kI * p.eta * p.cos_psi;
    const Eigen::MatrixXcd d_minus = smf - rec * smf * xf;
    const Eigen::MatrixXcd d_plus = spf + rec * spf * xf;

    RegressionSetup setup;
    setup.source = vec(d_minus * steady);
    setup.probe.resize(dim * dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            setup.probe(j + dim * i) = d_plus(i, j);
    return setup;
}

}  // namespace

SpectrumCurve regression_spectrum(const FullLiouvillian& liouville,
                                  const Eigen::MatrixXcd& steady,
                                  const std::vector<double>& grid) {
    const RegressionSetup setup = regression_setup(liouville, steady);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(liouville.op.rows(),
                                                           liouville.op.cols());
    SpectrumCurve curve;
    curve.omega = grid;
    curve.value.resize(grid.size());
    // one independent solve per point; the assembled operator is shared
    // read-only across the workers
    parallel_for(grid.size(), [&](std::size_t i) {
        const Eigen::MatrixXcd m = kI * grid[i] * id - liouville.op;
        const Eigen::VectorXcd x = m.partialPivLu().solve(setup.source);
        if (!x.allFinite()
            || (m * x - setup.source).norm() > 1e-8 * setup.source.norm()) {
            curve.value[i] = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        curve.value[i] = (setup.probe * x)(0).real();
    });
    return curve;
}

double regression_spectrum_at(const FullLiouvillian& liouville,
                              const Eigen::MatrixXcd& steady, double omega) {
    return regression_spectrum(liouville, steady, {omega}).value.front();
}

Eigen::MatrixXcd exp_ikx_elements(const MotionalBasis& basis, double c) {
    guard_levels(basis);
    const int n = basis.n_levels;
    int samples = 8192;  // Simpson panels (even)
    double lo = 0.0, hi = 0.0;
    std::vector<std::vector<double>> wf(n);

    if (basis.kind == PotentialKind::SquareWell) {
        lo = -0.5;
        hi = 0.5;
    } else if (basis.kind == PotentialKind::Harmonic) {
        const double reach = std::sqrt(2.0 * n + 1.0) + 8.0;
        lo = -reach;
        hi = reach;
    } else {
        throw std::invalid_argument("exp_ikx_elements: analytic wavefunctions exist only for the square well and harmonic bases");
    }

    const double h = (hi - lo) / samples;
    for (int k = 0; k < n; ++k)
        wf[k].resize(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        const double x = lo + i * h;
        if (basis.kind == PotentialKind::SquareWell) {
            for (int k = 0; k < n; ++k) {
                const double arg = (k + 1) * kPi * x;
                wf[k][i] = std::sqrt(2.0) * (k % 2 == 0 ? std::cos(arg) : std::sin(arg));
            }
        } else {
            // normalized Hermite functions by recurrence
            double h0 = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
            double h1 = std::sqrt(2.0) * x * h0;
            for (int k = 0; k < n; ++k) {
                wf[k][i] = (k == 0) ? h0 : h1;
                if (k >= 1) {
                    const double h2 = std::sqrt(2.0 / (k + 1.0)) * x * h1
                                      - std::sqrt(double(k) / (k + 1.0)) * h0;
                    h0 = h1;
                    h1 = h2;
                }
            }
        }
    }

    Eigen::MatrixXcd out(n, n);
    const double inv_xi = 1.0 / basis.xi_natural;
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            complex acc = 0.0;
            for (int i = 0; i <= samples; ++i) {
                const double x = lo + i * h;
                const double weight = (i == 0 || i == samples) ? 1.0
                                      : (i % 2 == 1 ? 4.0 : 2.0);
                acc += weight * wf[a][i] * wf[b][i]
                       * std::exp(kI * c * x * inv_xi);
            }
            acc *= h / 3.0;
            out(a, b) = acc;
            out(b, a) = acc;  // symmetric, not conjugated: real wavefunctions
        }
    }
    return out;
}

FullLiouvillian assemble_exact_recoil(const MotionalBasis& basis, const LaserParams& p,
                                      int quadrature_points) {
    guard_levels(basis);
    const ProductOperators ops = lift(basis);
    const int dim = ops.dim;
    const int n = basis.n_levels;

    FullLiouvillian out;
    out.n_levels = n;
    out.params = p;
    out.x_elem = basis.x_elem;
    out.op = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);

    Eigen::MatrixXcd h_ext = Eigen::MatrixXcd::Zero(dim, dim);
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < n; ++k)
            h_ext(s * n + k, s * n + k) = basis.energies[k];

    const Eigen::MatrixXcd e_drive = kron(Eigen::Matrix2cd::Identity(),
                                          exp_ikx_elements(basis, p.eta * p.cos_phi));
    const Eigen::MatrixXcd w_full = (p.omega / 2.0)
        * (ops.sigma_plus * e_drive + ops.sigma_minus * e_drive.adjoint());
    out.op += commutator_super(-p.delta * ops.proj_e + h_ext + w_full);

    const specfun::QuadratureRule rule = specfun::gauss_legendre(quadrature_points);
    for (int g = 0; g < quadrature_points; ++g) {
        const double u = rule.nodes[g];
        const double w = rule.weights[g] * (3.0 / 8.0) * (1.0 + u * u);
        const Eigen::MatrixXcd jump = ops.sigma_minus
            * kron(Eigen::Matrix2cd::Identity(), exp_ikx_elements(basis, -p.eta * u));
        out.op += (p.gamma / 2.0) * w * lindblad_super(jump);
    }

    out.trace_defect = trace_column_defect(out.op, dim);
    const double scale = std::max(out.op.cwiseAbs().maxCoeff(), 1.0);
    if (out.trace_defect > 1e-12 * scale)
        throw std::runtime_error("assemble_exact_recoil: trace preservation violated at assembly");
    return out;
}

}  // namespace sideband
