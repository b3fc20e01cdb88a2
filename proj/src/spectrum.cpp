#include "sideband/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sideband/parallel.hpp"
#include "sideband/specfun.hpp"

namespace sideband {

namespace {

constexpr complex kI{0.0, 1.0};

void require_pair(const MotionalBasis& basis, int n, int m) {
    if (n < 0 || m < 0 || n >= basis.n_levels || m >= basis.n_levels)
        throw std::out_of_range("spectrum: level index out of range");
    if (n == m)
        throw std::invalid_argument("spectrum: need two distinct levels");
}

}  // namespace

double first_order_shift(const MotionalBasis& basis, const LaserParams& p, int n, int m) {
    require_pair(basis, n, m);
    return p.gamma * p.omega * p.omega * p.eta * p.cos_phi
           / (4.0 * p.normalization())
           * (basis.x_elem(n, n) - basis.x_elem(m, m));
}

SecondOrder second_order_correction(const MotionalBasis& basis, const LaserParams& p,
                                    int n, int m) {
    require_pair(basis, n, m);
    const double big_n = p.normalization();
    const double d_coeff = diffusion_coefficient(p);
    const complex s_q0 = s_func_regular_zero(p);

    complex lambda2 = kI * p.delta * p.omega * p.omega * p.eta * p.eta
                      * p.cos_phi * p.cos_phi / (4.0 * big_n)
                      * (basis.x2_diag[n] - basis.x2_diag[m]);
    // The recoil cross term D X_nn X_mm plus the same structure from the
    // second-order resolvent contraction at zero frequency. Together with
    // the diagonal (j = n, m) sum terms this is the pure-dephasing
    // combination (Re s_Q(0) + D/2)(X_nn - X_mm)^2 entering the width.
    lambda2 += (d_coeff + 2.0 * s_q0.real())
               * basis.x_elem(n, n) * basis.x_elem(m, m);

    const int levels = basis.n_levels;
    std::vector<double> term_mag(levels, 0.0);
    for (int j = 0; j < levels; ++j) {
        const complex s_jn = (j == n) ? s_q0 : s_func(p, basis.transition_frequency(j, n));
        const complex s_jm = (j == m) ? s_q0 : s_func(p, basis.transition_frequency(j, m));
        const double x_jn2 = basis.x_elem(j, n) * basis.x_elem(j, n);
        const double x_jm2 = basis.x_elem(j, m) * basis.x_elem(j, m);
        const complex contrib = -(s_jn + 0.5 * d_coeff) * x_jn2
                                - (std::conj(s_jm) + 0.5 * d_coeff) * x_jm2;
        lambda2 += contrib;
        term_mag[j] = std::abs(contrib);
    }

    SecondOrder out;
    out.shift2 = lambda2.imag();
    out.width = -lambda2.real();

    const int tail_start = levels - std::max(1, levels / 10);
    double tail = 0.0, total = 0.0;
    for (int j = 0; j < levels; ++j) {
        total += term_mag[j];
        if (j >= tail_start)
            tail += term_mag[j];
    }
    out.tail_warning = total > 0.0 && tail > 0.01 * total;
    return out;
}

std::vector<SidebandPeak> sideband_peaks(const MotionalBasis& basis, const LaserParams& p,
                                         const Populations& pops, SpectrumMode mode) {
    if (static_cast<int>(pops.p.size()) != basis.n_levels)
        throw std::invalid_argument("sideband_peaks: populations do not match the basis");
    std::vector<SidebandPeak> peaks;
    peaks.reserve(static_cast<std::size_t>(basis.n_levels) * (basis.n_levels - 1));
    for (int n = 0; n < basis.n_levels; ++n) {
        for (int m = 0; m < basis.n_levels; ++m) {
            if (n == m)
                continue;
            SidebandPeak pk;
            pk.n = n;
            pk.m = m;
            pk.omega0 = basis.transition_frequency(n, m);
            pk.shift1 = first_order_shift(basis, p, n, m);
            const SecondOrder so = second_order_correction(basis, p, n, m);
            pk.shift2 = so.shift2;
            pk.width = so.width;
            const double x2 = basis.x_elem(n, m) * basis.x_elem(n, m);
            const complex rt = r_tilde(p, pk.omega0);
            if (mode == SpectrumMode::Full) {
                pk.weight = x2 * (pops.p[m] * std::norm(rt)
                                  + (pops.p[n] - pops.p[m]) * rt * q_func(p, pk.omega0));
            } else {
                pk.weight = x2 * pops.p[m] * std::norm(rt);
            }
            peaks.push_back(pk);
        }
    }
    return peaks;
}

namespace {

double peak_height(const SidebandPeak& pk) {
    return std::abs(pk.weight.real()) / pk.width;
}

double curve_value(const std::vector<SidebandPeak>& peaks, double omega, SpectrumMode mode) {
    double total = 0.0;
    for (const SidebandPeak& pk : peaks) {
        const double detune = omega - pk.position();
        if (mode == SpectrumMode::Full) {
            total += (pk.weight / (kI * detune + pk.width)).real();
        } else {
            total += pk.width * pk.weight.real() / (pk.width * pk.width + detune * detune);
        }
    }
    return total;
}

std::vector<SidebandPeak> filter_peaks(std::vector<SidebandPeak> peaks) {
    double max_height = 0.0;
    for (const SidebandPeak& pk : peaks)
        max_height = std::max(max_height, peak_height(pk));
    std::vector<SidebandPeak> kept;
    for (SidebandPeak& pk : peaks)
        if (peak_height(pk) > 1e-12 * max_height)
            kept.push_back(pk);
    std::sort(kept.begin(), kept.end(),
              [](const SidebandPeak& a, const SidebandPeak& b) { return a.position() < b.position(); });
    return kept;
}

}  // namespace

SpectrumResult sideband_spectrum(const MotionalBasis& basis, const LaserParams& p,
                                 const Populations& pops, const std::vector<double>& grid,
                                 SpectrumMode mode) {
    if (grid.empty())
        throw std::invalid_argument("sideband_spectrum: empty frequency grid");
    const std::vector<SidebandPeak> all = sideband_peaks(basis, p, pops, mode);
    SpectrumResult out;
    out.curve.omega = grid;
    out.curve.value.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        out.curve.value[i] = curve_value(all, grid[i], mode);
    });
    out.peaks = filter_peaks(all);
    return out;
}

std::vector<double> default_spectrum_grid(const MotionalBasis& basis, const LaserParams& p,
                                          const Populations& pops, SpectrumMode mode) {
    const std::vector<SidebandPeak> peaks = filter_peaks(sideband_peaks(basis, p, pops, mode));
    std::vector<double> grid;
    grid.reserve(peaks.size() * 400);
    for (const SidebandPeak& pk : peaks) {
        const double lo = pk.position() - 20.0 * pk.width;
        const double hi = pk.position() + 20.0 * pk.width;
        for (int i = 0; i < 400; ++i)
            grid.push_back(lo + (hi - lo) * i / 399.0);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

SpectrumResult psi_averaged_spectrum(const MotionalBasis& basis, const LaserParams& p,
                                     const Populations& pops, const std::vector<double>& grid,
                                     SpectrumMode mode) {
    const specfun::QuadratureRule rule = specfun::gauss_legendre(16);
    SpectrumResult out;
    out.curve.omega = grid;
    out.curve.value.assign(grid.size(), 0.0);
    for (int k = 0; k < 16; ++k) {
        LaserParams pk = p;
        pk.cos_psi = rule.nodes[k];
        const double w = rule.weights[k] * (3.0 / 8.0) * (1.0 + rule.nodes[k] * rule.nodes[k]);
        const SpectrumResult part = sideband_spectrum(basis, pk, pops, grid, mode);
        for (std::size_t i = 0; i < grid.size(); ++i)
            out.curve.value[i] += w * part.curve.value[i];
        if (k == 7)  // node nearest the symmetry axis; representative peak list
            out.peaks = part.peaks;
    }
    return out;
}

SpectrumCurve harmonic_sideband_spectrum(const LaserParams& p, double nu, double mbar,
                                         const std::vector<double>& grid) {
    if (grid.empty())
        throw std::invalid_argument("harmonic_sideband_spectrum: empty frequency grid");
    const HarmonicReference ref = harmonic_reference(p, nu, 2);
    if (!ref.cooling)
        throw std::runtime_error("harmonic_sideband_spectrum: heating regime, no stationary spectrum");
    const double gamma_ho = ref.a_minus - ref.a_plus;

    // nu_tilde = nu + shift2 evaluated on the harmonic ladder; the (0,1) pair
    // with four levels carries the full j sums exactly.
    const MotionalBasis ladder = build_harmonic(4, nu);
    const double nu_tilde = nu + second_order_correction(ladder, p, 0, 1).shift2;

    const complex rt_blue = r_tilde(p, nu);
    const complex rt_red = r_tilde(p, -nu);
    const complex w_blue = mbar * std::norm(rt_blue) + rt_blue * q_func(p, nu);
    const complex w_red = (mbar + 1.0) * std::norm(rt_red) - rt_red * q_func(p, -nu);

    SpectrumCurve curve;
    curve.omega = grid;
    curve.value.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        curve.value[i] = (w_blue / (kI * (w - nu_tilde) + gamma_ho)).real()
                         + (w_red / (kI * (w + nu_tilde) + gamma_ho)).real();
    }
    return curve;
}

RegimeReport validate_regime(const MotionalBasis& basis, const LaserParams& p, double mbar) {
    RegimeReport report;
    double min_abs = std::numeric_limits<double>::infinity();
    std::vector<double> freqs;
    for (int n = 0; n < basis.n_levels; ++n) {
        for (int m = n + 1; m < basis.n_levels; ++m) {
            const double w = std::abs(basis.transition_frequency(n, m));
            freqs.push_back(w);
            min_abs = std::min(min_abs, w);
        }
    }
    std::sort(freqs.begin(), freqs.end());
    for (std::size_t i = 1; i < freqs.size(); ++i) {
        if (freqs[i] - freqs[i - 1] <= 1e-12 * std::max(freqs[i], 1.0)) {
            report.degenerate = true;
            break;
        }
    }
    report.min_transition = min_abs;
    report.eta_omega_ratio = p.eta * p.omega / min_abs;
    report.occupancy_proxy = p.eta * std::sqrt(2.0 * mbar + 1.0);
    if (report.degenerate)
        report.warnings.push_back("degenerate transition frequencies: non-degenerate perturbation theory does not apply");
    if (report.eta_omega_ratio > 0.1)
        report.warnings.push_back("eta*Omega is not small against the level splitting; eigenvalue corrections overlap");
    if (report.occupancy_proxy > 0.1)
        report.warnings.push_back("occupied wavepacket approaches the wavelength scale");
    for (const std::string& w : p.validate())
        report.warnings.push_back(w);
    return report;
}

}  // namespace sideband
