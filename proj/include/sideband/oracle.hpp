#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "sideband/basis.hpp"
#include "sideband/internal.hpp"
#include "sideband/spectrum.hpp"

namespace sideband {

// Expanded Liouvillian L0 + L1 + L2 on the truncated internal (x) motional
// product space, vectorized column-major; dimension (2 n_levels)^2.
struct FullLiouvillian {
    Eigen::MatrixXcd op;
    int n_levels = 0;
    LaserParams params;
    Eigen::MatrixXd x_elem;     // motional X matrix, kept for the dipole operators
    std::array<bool, 3> orders{true, true, true};
    double trace_defect = 0.0;  // max |trace functional . column|
};

// Kronecker-lifted assembly; the dimension guard rejects n_levels > 12.
FullLiouvillian assemble_full(const MotionalBasis& basis, const LaserParams& p,
                              std::array<bool, 3> orders = {true, true, true});

struct FullSteadyState {
    Eigen::MatrixXcd rho;          // (2n) x (2n), hermitized, trace one
    double hermiticity_defect = 0.0;  // before symmetrization
    double residual = 0.0;            // ||L rho||_inf / ||L||_inf
    double min_eigenvalue = 0.0;      // of the hermitized state
};

// Kernel of the assembled generator; throws when the kernel is not
// one-dimensional.
FullSteadyState full_steady_state(const FullLiouvillian& liouville);

// Marginals of a product-space density matrix.
std::vector<double> motional_populations(const Eigen::MatrixXcd& rho, int n_levels);
Eigen::Matrix2cd internal_marginal(const Eigen::MatrixXcd& rho, int n_levels);

// Emission spectrum by the quantum regression theorem,
// S(omega) = Re Tr{D+ (i(omega - omega_L) - L)^{-1} D- rho_st},
// with D+- expanded to first order in eta. One linear solve per point;
// points where the solve is singular are recorded as NaN.
SpectrumCurve regression_spectrum(const FullLiouvillian& liouville,
                                  const Eigen::MatrixXcd& steady,
                                  const std::vector<double>& grid);

double regression_spectrum_at(const FullLiouvillian& liouville,
                              const Eigen::MatrixXcd& steady, double omega);

// Matrix elements <n|exp(i c x/xi)|m> by quadrature on the analytic
// wavefunctions; square well and harmonic bases only.
Eigen::MatrixXcd exp_ikx_elements(const MotionalBasis& basis, double c);

// Master equation with the exact recoil kernel: the angular integral
// of D[sigma_- exp(-i eta u X)] is discretized by Gauss-Legendre quadrature
// and the coupling W(x) keeps its full exponential. Square well and
// harmonic bases only; a stretch verification path next to the expanded
// generator above.
FullLiouvillian assemble_exact_recoil(const MotionalBasis& basis, const LaserParams& p,
                                      int quadrature_points = 16);

}  // namespace sideband
