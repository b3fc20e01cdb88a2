#pragma once

#include <vector>

#include "sideband/basis.hpp"
#include "sideband/cooling.hpp"
#include "sideband/internal.hpp"

namespace sideband {

// One motional sideband: the transition m -> n observed at
// omega_L + omega_nm + shift1 + shift2 with half width `width`.
struct SidebandPeak {
    int n = 0;
    int m = 0;
    double omega0 = 0.0;  // bare transition frequency omega_nm
    double shift1 = 0.0;  // first-order light shift
    double shift2 = 0.0;  // second-order shift
    double width = 0.0;   // gamma_nm > 0
    complex weight;       // bracketed weight factor times X_nm^2

    double position() const { return omega0 + shift1 + shift2; }
};

// Sampled spectrum on a grid of offsets omega - omega_L.
struct SpectrumCurve {
    std::vector<double> omega;
    std::vector<double> value;
};

enum class SpectrumMode { Full, LowIntensity };

// First-order peak shift; vanishes for even potentials.
double first_order_shift(const MotionalBasis& basis, const LaserParams& p, int n, int m);

struct SecondOrder {
    double shift2 = 0.0;
    double width = 0.0;
    bool tail_warning = false;  // last 10% of j terms carried > 1% of the sum
};

// Second-order eigenvalue correction lambda_nm^(2) = i shift2 - width.
// Diagonal (j = n, j = m) contributions use the kernel-projected s at zero;
// they vanish for even potentials where <n|x|n> = 0.
SecondOrder second_order_correction(const MotionalBasis& basis, const LaserParams& p,
                                    int n, int m);

// All sideband peaks for the given populations; unfiltered, every n != m pair.
std::vector<SidebandPeak> sideband_peaks(const MotionalBasis& basis, const LaserParams& p,
                                         const Populations& pops, SpectrumMode mode);

struct SpectrumResult {
    SpectrumCurve curve;
    std::vector<SidebandPeak> peaks;  // peaks above the relative height floor
};

// Motional sideband spectrum. Full mode is the second-order expression with
// complex weights; low-intensity mode is the Lorentzian sum valid below
// saturation. Peaks with height below 1e-12 of the tallest are omitted from
// the returned list but still contribute to the curve.
SpectrumResult sideband_spectrum(const MotionalBasis& basis, const LaserParams& p,
                                 const Populations& pops, const std::vector<double>& grid,
                                 SpectrumMode mode);

// Union of per-peak windows position +- 20 width, 400 points each.
std::vector<double> default_spectrum_grid(const MotionalBasis& basis, const LaserParams& p,
                                          const Populations& pops, SpectrumMode mode);

// Spectrum averaged over the detection direction with the dipole pattern
// w(u) = (3/8)(1 + u^2), u = cos psi.
SpectrumResult psi_averaged_spectrum(const MotionalBasis& basis, const LaserParams& p,
                                     const Populations& pops, const std::vector<double>& grid,
                                     SpectrumMode mode);

// Two-peak reference spectrum of the harmonic trap with the degenerate-theory
// width gamma = A_minus - A_plus and renormalized frequency nu_tilde.
SpectrumCurve harmonic_sideband_spectrum(const LaserParams& p, double nu, double mbar,
                                         const std::vector<double>& grid);

// Validity diagnostics of the non-degenerate perturbative treatment.
struct RegimeReport {
    double min_transition = 0.0;    // min over n != n' of |omega_nn'|
    double eta_omega_ratio = 0.0;   // eta Omega / min_transition
    double occupancy_proxy = 0.0;   // eta sqrt(2 mbar + 1)
    bool degenerate = false;        // repeated transition frequencies
    std::vector<std::string> warnings;
};

RegimeReport validate_regime(const MotionalBasis& basis, const LaserParams& p,
                             double mbar = 0.0);

}  // namespace sideband
