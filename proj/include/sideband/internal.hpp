#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sideband/linalg.hpp"

namespace sideband {

// Laser and geometry parameters. All frequencies share one unit (set
// gamma = 1 to work in units of the linewidth); hbar = 1 throughout.
struct LaserParams {
    double delta = 0.0;     // laser detuning Delta = omega_L - omega_0
    double omega = 0.0;     // Rabi frequency
    double gamma = 1.0;     // spontaneous emission rate
    double cos_phi = 1.0;   // laser projection on the motional axis
    double cos_psi = 0.0;   // detector projection on the motional axis
    double eta = 0.1;       // Lamb-Dicke parameter k*xi
    double alpha = 0.4;     // second moment of the radiation pattern

    // N = Gamma^2/4 + Delta^2 + Omega^2/2
    double normalization() const;
    complex delta_tilde() const;  // Delta + i Gamma/2

    // Hard violations throw std::invalid_argument; soft issues are returned.
    std::vector<std::string> validate() const;
};

// Internal Liouvillian in the ordered basis {|g><g|, |e><g|, |g><e|, |e><e|},
// which coincides with the column-major vectorization of a 2x2 operator.
Eigen::Matrix4cd liouvillian_matrix(const LaserParams& p);

// Steady state of the internal dynamics, basis {|g>, |e>}.
Eigen::Matrix2cd internal_steady_state(const LaserParams& p);

// Coupling operator W1 (the coefficient of x in the eta expansion of W),
// i (Omega/2) eta cos_phi (sigma_+ - sigma_-), as a 2x2 matrix.
Eigen::Matrix2cd w1_operator(const LaserParams& p);

// Solves (z - L_I) x = v by dense LU; throws if z hits an eigenvalue.
Eigen::Vector4cd resolvent_apply(const LaserParams& p, complex z,
                                 const Eigen::Vector4cd& v);

// Internal correlation functions. The eta cos_phi geometry factors are
// included (linearly in r and q, squared in s). r and s are closed forms;
// q is assembled from the two resolvent terms because the closed rational
// form quoted for it in the literature is inconsistent (see q_func_printed).
complex r_func(const LaserParams& p, double omega);
complex q_func(const LaserParams& p, double omega);
complex s_func(const LaserParams& p, double omega);

// The same three functions evaluated through the resolvent of the internal
// Liouvillian; independent transcriptions used as mutual cross-checks.
complex r_func_resolvent(const LaserParams& p, double omega);
complex q_func_resolvent(const LaserParams& p, double omega);
complex s_func_resolvent(const LaserParams& p, double omega);

// The closed rational form quoted for q in the literature, transcribed as
// printed. It does not reproduce the resolvent evaluation: it neither decays
// for large omega nor cancels the omega = 0 kernel pole. Kept only for the
// verification report.
complex q_func_printed(const LaserParams& p, double omega);

// r~(omega) = r(omega) - (Delta + i Gamma/2) Omega eta cos_psi / (2N)
complex r_tilde(const LaserParams& p, double omega);

// Kernel-projected value of s at omega = 0: the pole i c0^2/omega carried by
// the steady-state component of W1 rho_st is removed, the remainder is the
// finite part that enters diagonal (j = n) second-order sums.
complex s_func_regular_zero(const LaserParams& p);

// Maximum relative deviation between the closed forms and the resolvent
// evaluation over an omega grid. For q the transcribed closed form is the
// one compared (and expected to deviate; the production q is resolvent-based).
struct InternalDeviation {
    double r = 0.0;
    double q_printed = 0.0;
    double s = 0.0;
};

InternalDeviation compare_internal_paths(const LaserParams& p,
                                         const std::vector<double>& omega_grid);

}  // namespace sideband
