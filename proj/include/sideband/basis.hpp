#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sideband {

enum class PotentialKind { SquareWell, Morse, Harmonic, Numeric };

std::string to_string(PotentialKind kind);

// Truncated motional eigensystem of the trapping potential. Lengths are in
// units of xi, the ground-state position uncertainty, so all matrix elements
// are dimensionless and the laser wavenumber enters only through eta = k*xi.
struct MotionalBasis {
    PotentialKind kind = PotentialKind::Harmonic;
    double morse_a = 0.0;              // anharmonicity parameter, Morse only
    int n_levels = 0;
    std::vector<double> energies;      // eps_n / hbar
    Eigen::MatrixXd x_elem;            // X_nm = <n|x|m> / xi, symmetric
    std::vector<double> x2_diag;       // <n|x^2|n> / xi^2
    double xi_natural = 0.0;           // xi in the potential's natural length
    std::vector<std::string> warnings;

    // omega_nm = (eps_m - eps_n) / hbar
    double transition_frequency(int n, int m) const;

    // |<n|x^2|n> - sum_j X_nj^2|, the truncation (completeness) defect
    double completeness_defect(int n) const;
};

// Infinite square well of length L, nu = hbar pi^2 / (2 M L^2).
MotionalBasis build_square_well(int n_levels, double nu);

// Morse potential with depth parameter a = sqrt(2MU)/(hbar kappa) and
// nu = kappa sqrt(2U/M). Bound states only; n_levels <= floor(a-1/2)+1.
// n_levels <= 0 selects all bound states.
MotionalBasis build_morse(double a, double nu, int n_levels = 0);

int morse_bound_states(double a);

// Harmonic oscillator; energies are stored without the zero-point offset.
MotionalBasis build_harmonic(int n_levels, double nu);

struct UniformGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_points = 0;
};

// Finite-difference diagonalization of p^2/2M + V(x) for a sampled potential
// (positions in an arbitrary length unit, energies with hbar = 1). The
// samples are interpolated linearly onto the uniform grid.
MotionalBasis build_numeric(const std::vector<std::pair<double, double>>& v_samples,
                            double mass, int n_levels, const UniformGrid& grid);

// JSON document {label, parameters, energies, x_elem, x2_diag, xi_natural};
// doubles survive the round trip bit-exactly.
std::string basis_to_json(const MotionalBasis& basis);
MotionalBasis basis_from_json(const std::string& text);

}  // namespace sideband
