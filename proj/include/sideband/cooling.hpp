#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sideband/basis.hpp"
#include "sideband/internal.hpp"

namespace sideband {

// Transition rates A(n, m) = rate m -> n in units of the common frequency
// unit, plus the recoil diffusion coefficient D. A(n, n) = 0 by convention.
struct RateCoefficients {
    Eigen::MatrixXd A;
    double D = 0.0;
};

struct Populations {
    std::vector<double> p;
    double mbar = 0.0;
};

// D = alpha Gamma Omega^2 eta^2 / (4N)
double diffusion_coefficient(const LaserParams& p);

// A_nm = [2 Re s(omega_nm) + D] X_nm^2 for n != m.
RateCoefficients transition_rates(const MotionalBasis& basis, const LaserParams& p);

// Rate matrix: off-diagonal (i, j) = A_ij, diagonal (j, j) = -sum_{m != j} A_mj.
// Column sums vanish exactly under the canonical compensated column sum.
Eigen::MatrixXd rate_matrix(const RateCoefficients& rc);

// Canonical column-sum check: compensated sum of the off-diagonal entries in
// increasing row order, then the diagonal added last. Returns the largest
// absolute column sum.
double max_column_sum_defect(const Eigen::MatrixXd& m);

// Null space of the rate matrix, normalized to sum 1. Throws when the rate
// graph is disconnected (kernel dimension > 1), naming the components.
Populations steady_populations(const Eigen::MatrixXd& rate_mat);

// Population mass in the top fraction of retained levels; used to flag
// steady states that are not converged below the truncation.
double top_level_mass(const Populations& pops, double top_fraction = 0.1);

struct CoolingPoint {
    double delta = 0.0;
    double mbar = 0.0;
    double top_mass = 0.0;
    bool converged = false;  // solver succeeded and top_mass <= 1%
};

// One rate-equation solve per detuning; points are computed in parallel and
// per-point failures are recorded as gaps (converged = false, mbar = NaN).
std::vector<CoolingPoint> cooling_curve(const MotionalBasis& basis,
                                        const LaserParams& laser_template,
                                        const std::vector<double>& delta_grid);

struct OptimalDetuning {
    double delta = 0.0;
    double mbar = 0.0;
    bool at_boundary = false;
};

// Grid argmin refined by golden-section search in the bracketing interval
// down to a step of 1e-3 Gamma. The evaluator maps a detuning to mbar.
OptimalDetuning optimal_detuning(const std::vector<CoolingPoint>& curve,
                                 const std::function<double(double)>& mbar_of_delta,
                                 double gamma);

OptimalDetuning optimal_detuning(const MotionalBasis& basis,
                                 const LaserParams& laser_template,
                                 const std::vector<CoolingPoint>& curve);

// Detailed-balance reference of the harmonic trap.
struct HarmonicReference {
    double a_plus = 0.0;   // 2 Re s(-nu) + D
    double a_minus = 0.0;  // 2 Re s(+nu) + D
    double mbar = 0.0;
    bool cooling = false;  // a_minus > a_plus
    std::vector<double> populations;
};

HarmonicReference harmonic_reference(const LaserParams& p, double nu, int n_levels = 64);

std::vector<double> thermal_populations(double mbar, int n_levels);

// Square-well basis grown until mbar reaches a relative plateau (no strict
// limit exists: the diffusion-dominated high ladder adds mass indefinitely,
// so one growth step may move mbar by at most tol * max(1, mbar)).
struct ConvergedWell {
    MotionalBasis basis;
    Populations pops;
    int n_levels = 0;
};

ConvergedWell adaptive_square_well(double nu, const LaserParams& p,
                                   double tol = 1e-3, int start_levels = 16,
                                   int max_levels = 400);

}  // namespace sideband
