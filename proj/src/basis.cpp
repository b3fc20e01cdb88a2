#include "sideband/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "sideband/specfun.hpp"

namespace sideband {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_levels(int n_levels) {
    if (n_levels < 2)
        throw std::invalid_argument("MotionalBasis: n_levels must be >= 2");
}

}  // namespace

std::string to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::SquareWell: return "square_well";
        case PotentialKind::Morse: return "morse";
        case PotentialKind::Harmonic: return "harmonic";
        case PotentialKind::Numeric: return "numeric";
    }
    return "unknown";
}

double MotionalBasis::transition_frequency(int n, int m) const {
    if (n < 0 || m < 0 || n >= n_levels || m >= n_levels)
        throw std::out_of_range("transition_frequency: level index out of range");
    return energies[m] - energies[n];
}

double MotionalBasis::completeness_defect(int n) const {
    if (n < 0 || n >= n_levels)
        throw std::out_of_range("completeness_defect: level index out of range");
    double sum = 0.0;
    for (int j = 0; j < n_levels; ++j)
        sum += x_elem(n, j) * x_elem(n, j);
    return std::abs(x2_diag[n] - sum);
}

MotionalBasis build_square_well(int n_levels, double nu) {
    require_levels(n_levels);
    MotionalBasis basis;
    basis.kind = PotentialKind::SquareWell;
    basis.n_levels = n_levels;
    // xi/L from the ground-state variance <0|x^2|0> = L^2/12 (1 - 6/pi^2)
    basis.xi_natural = std::sqrt((kPi * kPi - 6.0) / 3.0) / (2.0 * kPi);

    basis.energies.resize(n_levels);
    for (int n = 0; n < n_levels; ++n)
        basis.energies[n] = double(n + 1) * double(n + 1) * nu;

    basis.x_elem = Eigen::MatrixXd::Zero(n_levels, n_levels);
    for (int n = 0; n < n_levels; ++n) {
        for (int m = n + 1; m < n_levels; ++m) {
            if ((n + m) % 2 == 0)
                continue;  // equal parity
            const double dn = n + 1, dm = m + 1;
            const double denom = (dn * dn - dm * dm) * (dn * dn - dm * dm);
            const int sign = ((n + m + 1) / 2) % 2 == 0 ? 1 : -1;
            const double in_L = -8.0 * dn * dm * sign / (kPi * kPi * denom);
            basis.x_elem(n, m) = basis.x_elem(m, n) = in_L / basis.xi_natural;
        }
    }

    basis.x2_diag.resize(n_levels);
    const double xi2 = basis.xi_natural * basis.xi_natural;
    for (int n = 0; n < n_levels; ++n) {
        const double dn = n + 1;
        basis.x2_diag[n] = (1.0 - 6.0 / (dn * dn * kPi * kPi)) / (12.0 * xi2);
    }
    return basis;
}

int morse_bound_states(double a) {
    if (a <= 0.5)
        throw std::invalid_argument("morse_bound_states: need a > 1/2");
    return static_cast<int>(std::floor(a - 0.5)) + 1;
}

namespace {

// Normalized Morse bound state in kappa = 1 units, z = 2a exp(-x).
double morse_wavefunction(double a, int n, double x) {
    const double c = 2.0 * a - 2.0 * n - 1.0;
    const double z = 2.0 * a * std::exp(-x);
    const double log_norm = 0.5 * (std::log(c) + std::lgamma(n + 1.0)
                                   - std::lgamma(2.0 * a - n));
    const double envelope = log_norm + (a - n - 0.5) * std::log(z) - 0.5 * z;
    // generalized Laguerre recurrence
    double l0 = 1.0, l1 = 1.0 + c - z;
    double laguerre = (n == 0) ? l0 : l1;
    for (int k = 2; k <= n; ++k) {
        const double l2 = ((2 * k - 1 + c - z) * l1 - (k - 1 + c) * l0) / k;
        l0 = l1;
        l1 = l2;
        laguerre = l2;
    }
    return std::exp(envelope) * laguerre;
}

// <n|x|n> and <n|x^2|n> (kappa = 1) by Simpson quadrature on the
// wavefunction; the workhorse for levels where the alternating
// generating-function sums cancel catastrophically.
std::pair<double, double> morse_diagonal_quadrature(double a, int n) {
    const double c = 2.0 * a - 2.0 * n - 1.0;
    const double z_max = 2.0 * a + 14.0 * std::sqrt(2.0 * a) + 60.0;
    const double lo = -std::log(z_max / (2.0 * a));
    const double hi = (80.0 + 4.0 * std::log(1.0 + 2.0 * a)) / std::min(1.0, c);
    const int panels = std::clamp(static_cast<int>((hi - lo) / 0.0015), 20000, 400000);
    const double h = (hi - lo) / panels;
    double first = 0.0, second = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double x = lo + i * h;
        const double weight = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double phi = morse_wavefunction(a, n, x);
        const double density = weight * phi * phi;
        first += density * x;
        second += density * x * x;
    }
    return {first * h / 3.0, second * h / 3.0};
}

// kappa <n|x|n> and kappa^2 <n|x^2|n> from the s-derivatives of the
// generating function <n|exp(sx)|n>, obtained by expanding the Laguerre
// polynomials, L_n^(c)(z) = sum_i (-1)^i binom(n+c, n-i) z^i / i!, under
// the integral over z = 2a exp(-kappa x):
//   <n|e^{sx}|n> = [c n!/Gamma(2a-n)] (2a)^{s/kappa}
//       sum_{j,l} (-1)^{j+l}/(j! l!) binom(2a-n-1, n-j) binom(2a-n-1, n-l)
//       Gamma(c + j + l - s/kappa),        c = 2a - 2n - 1.
// The binomial argument is 2a-n-1 = n + c; with 2a-2n-1 in its place the
// expansion fails the <n|n> = 1 normalization for every n >= 1.
// All Gamma ratios in log space. The alternating sum loses roughly
// log10(Gamma(c+2n)/result) digits to cancellation, which becomes fatal for
// mid-ladder levels of deep potentials; when more than six digits are lost
// the moments are evaluated by quadrature instead.
std::pair<double, double> morse_diagonal_moments(double a, int n) {
    using specfun::SignedLog;
    const double c = 2.0 * a - 2.0 * n - 1.0;
    const double log2a = std::log(2.0 * a);
    const SignedLog norm_num = specfun::lgamma_signed(double(n) + 1.0);
    const SignedLog norm_den = specfun::lgamma_signed(2.0 * a - n);
    const double log_norm = std::log(c) + norm_num.log_abs - norm_den.log_abs;

    double first = 0.0, second = 0.0;
    double second_abs = 0.0;
    for (int j = 0; j <= n; ++j) {
        const SignedLog bj = specfun::log_binomial_signed(2.0 * a - n - 1.0, n - j);
        if (bj.sign == 0)
            continue;
        const SignedLog lj = specfun::lgamma_signed(double(j) + 1.0);
        for (int l = 0; l <= n; ++l) {
            const SignedLog bl = specfun::log_binomial_signed(2.0 * a - n - 1.0, n - l);
            if (bl.sign == 0)
                continue;
            const SignedLog ll = specfun::lgamma_signed(double(l) + 1.0);
            const double arg = c + j + l;
            const double log_term = log_norm - lj.log_abs - ll.log_abs
                                    + bj.log_abs + bl.log_abs
                                    + specfun::lgamma_signed(arg).log_abs;
            int sign = bj.sign * bl.sign;
            if ((j + l) % 2 != 0)
                sign = -sign;
            const double term = sign * std::exp(log_term);
            const double dlog = log2a - specfun::digamma(arg);
            first += term * dlog;
            const double curvature = dlog * dlog + specfun::trigamma(arg);
            second += term * curvature;
            second_abs += std::abs(term) * curvature;
        }
    }
    const double loss = second_abs / std::max(std::abs(second), 1e-300);
    if (loss > 1e6)
        return morse_diagonal_quadrature(a, n);
    return {first, second};
}

}  // namespace

MotionalBasis build_morse(double a, double nu, int n_levels) {
    if (a <= 0.5)
        throw std::invalid_argument("build_morse: need a > 1/2");
    const int bound = morse_bound_states(a);
    if (n_levels <= 0)
        n_levels = bound;
    if (n_levels > bound)
        throw std::invalid_argument("build_morse: requested " + std::to_string(n_levels)
                                    + " levels but only " + std::to_string(bound)
                                    + " bound states exist");
    require_levels(n_levels);

    MotionalBasis basis;
    basis.kind = PotentialKind::Morse;
    basis.morse_a = a;
    basis.n_levels = n_levels;
    // xi = sqrt(psi^(1)(2a-1)) / kappa
    basis.xi_natural = std::sqrt(specfun::trigamma(2.0 * a - 1.0));

    basis.energies.resize(n_levels);
    for (int n = 0; n < n_levels; ++n) {
        const double half = n + 0.5;
        basis.energies[n] = (half - half * half / (2.0 * a)) * nu;
    }

    basis.x_elem = Eigen::MatrixXd::Zero(n_levels, n_levels);
    basis.x2_diag.resize(n_levels);
    const double inv_xi = 1.0 / basis.xi_natural;

    for (int n = 0; n < n_levels; ++n) {
        for (int m = n + 1; m < n_levels; ++m) {
            // <n|x|m> for n < m; the square root is assembled in log space
            const double log_sq =
                specfun::lgamma_signed(double(m) + 1.0).log_abs
                - specfun::lgamma_signed(double(n) + 1.0).log_abs
                + specfun::lgamma_signed(2.0 * a - m).log_abs
                - specfun::lgamma_signed(2.0 * a - n).log_abs
                + std::log(2.0 * a - 2.0 * n - 1.0)
                + std::log(2.0 * a - 2.0 * m - 1.0);
            const double mag = std::exp(0.5 * log_sq)
                               / (double(m - n) * (2.0 * a - n - m - 1.0));
            const int sign = ((n + m) % 2 == 0) ? -1 : 1;  // (-1)^(n+m) / (n-m)
            basis.x_elem(n, m) = basis.x_elem(m, n) = sign * mag * inv_xi;
        }
        const auto [x1, x2] = morse_diagonal_moments(a, n);
        basis.x_elem(n, n) = x1 * inv_xi;
        basis.x2_diag[n] = x2 * inv_xi * inv_xi;
    }
    return basis;
}

MotionalBasis build_harmonic(int n_levels, double nu) {
    require_levels(n_levels);
    MotionalBasis basis;
    basis.kind = PotentialKind::Harmonic;
    basis.n_levels = n_levels;
    basis.xi_natural = 1.0 / std::sqrt(2.0);  // in units of sqrt(hbar/(M nu))

    basis.energies.resize(n_levels);
    basis.x2_diag.resize(n_levels);
    basis.x_elem = Eigen::MatrixXd::Zero(n_levels, n_levels);
    for (int n = 0; n < n_levels; ++n) {
        basis.energies[n] = n * nu;
        basis.x2_diag[n] = 2.0 * n + 1.0;
        if (n + 1 < n_levels)
            basis.x_elem(n, n + 1) = basis.x_elem(n + 1, n) = std::sqrt(n + 1.0);
    }
    return basis;
}

MotionalBasis build_numeric(const std::vector<std::pair<double, double>>& v_samples,
                            double mass, int n_levels, const UniformGrid& grid) {
    require_levels(n_levels);
    if (v_samples.size() < 2)
        throw std::invalid_argument("build_numeric: need at least two potential samples");
    for (std::size_t i = 1; i < v_samples.size(); ++i)
        if (!(v_samples[i].first > v_samples[i - 1].first))
            throw std::invalid_argument("build_numeric: sample positions must be strictly increasing");
    if (grid.n_points < 8 || !(grid.x_max > grid.x_min))
        throw std::invalid_argument("build_numeric: invalid grid");
    if (n_levels > grid.n_points / 4)
        throw std::invalid_argument("build_numeric: n_levels must be small compared to the grid size");
    if (grid.x_min < v_samples.front().first || grid.x_max > v_samples.back().first)
        throw std::invalid_argument("build_numeric: grid exceeds the sampled potential range");
    if (mass <= 0.0)
        throw std::invalid_argument("build_numeric: mass must be positive");

    const int np = grid.n_points;
    const double h = (grid.x_max - grid.x_min) / (np - 1);

    // Linear interpolation of the samples onto the uniform grid.
    Eigen::VectorXd x(np), v(np);
    std::size_t seg = 0;
    for (int i = 0; i < np; ++i) {
        const double xi = grid.x_min + i * h;
        while (seg + 2 < v_samples.size() && v_samples[seg + 1].first < xi)
            ++seg;
        const auto& [xa, va] = v_samples[seg];
        const auto& [xb, vb] = v_samples[seg + 1];
        const double t = (xi - xa) / (xb - xa);
        x(i) = xi;
        v(i) = va + t * (vb - va);
    }

    // Second-order central differences, Dirichlet boundaries.
    const double kin = 1.0 / (2.0 * mass * h * h);
    Eigen::VectorXd diag = v.array() + 2.0 * kin;
    Eigen::VectorXd sub = Eigen::VectorXd::Constant(np - 1, -kin);

    // Only the lowest n_levels pairs of the tridiagonal are needed:
    // Sturm-sequence bisection for the eigenvalues, inverse iteration for
    // the vectors. Keeps large grids cheap (O(k n) instead of O(n^3)).
    const auto eigenvalues_below = [&](double x) {
        int count = 0;
        double q = diag(0) - x;
        if (q < 0.0)
            ++count;
        for (int i = 1; i < np; ++i) {
            const double denom = (q == 0.0) ? 1e-300 : q;
            q = diag(i) - x - sub(i - 1) * sub(i - 1) / denom;
            if (q < 0.0)
                ++count;
        }
        return count;
    };
    double lo_bound = diag(0), hi_bound = diag(0);
    for (int i = 0; i < np; ++i) {
        const double reach = (i > 0 ? std::abs(sub(i - 1)) : 0.0)
                             + (i + 1 < np ? std::abs(sub(i)) : 0.0);
        lo_bound = std::min(lo_bound, diag(i) - reach);
        hi_bound = std::max(hi_bound, diag(i) + reach);
    }
    const double span = hi_bound - lo_bound;

    Eigen::VectorXd values(n_levels);
    for (int k = 0; k < n_levels; ++k) {
        double lo = lo_bound, hi = hi_bound;
        while (hi - lo > 1e-15 * span + 1e-15 * (std::abs(lo) + std::abs(hi))) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi)
                break;  // bracket already at adjacent floats
            if (eigenvalues_below(mid) > k)
                hi = mid;
            else
                lo = mid;
        }
        values(k) = 0.5 * (lo + hi);
    }

    // Inverse iteration with a row-pivoted tridiagonal LU (the factored
    // upper triangle gains a second superdiagonal from the swaps).
    const auto solve_shifted = [&](double shift, Eigen::VectorXd rhs) {
        Eigen::VectorXd d = diag.array() - shift;
        Eigen::VectorXd du = sub;
        Eigen::VectorXd dl = sub;
        Eigen::VectorXd du2 = Eigen::VectorXd::Zero(std::max(np - 2, 0));
        std::vector<bool> swapped(std::max(np - 1, 0), false);
        for (int i = 0; i + 1 < np; ++i) {
            if (std::abs(d(i)) >= std::abs(dl(i))) {
                const double denom = (d(i) == 0.0) ? 1e-300 : d(i);
                const double fact = dl(i) / denom;
                dl(i) = fact;
                d(i + 1) -= fact * du(i);
            } else {
                swapped[i] = true;
                const double fact = d(i) / dl(i);
                d(i) = dl(i);
                dl(i) = fact;
                const double tmp = d(i + 1);
                d(i + 1) = du(i) - fact * tmp;
                du(i) = tmp;
                if (i + 2 < np) {
                    du2(i) = du(i + 1);
                    du(i + 1) *= -fact;
                }
            }
        }
        for (int i = 0; i + 1 < np; ++i) {
            if (swapped[i])
                std::swap(rhs(i), rhs(i + 1));
            rhs(i + 1) -= dl(i) * rhs(i);
        }
        Eigen::VectorXd sol(np);
        for (int i = np - 1; i >= 0; --i) {
            double acc = rhs(i);
            if (i + 1 < np)
                acc -= du(i) * sol(i + 1);
            if (i + 2 < np)
                acc -= du2(i) * sol(i + 2);
            const double denom = (d(i) == 0.0) ? 1e-300 : d(i);
            sol(i) = acc / denom;
        }
        return sol;
    };

    Eigen::MatrixXd vecs(np, n_levels);
    for (int k = 0; k < n_levels; ++k) {
        Eigen::VectorXd w(np);
        for (int i = 0; i < np; ++i)  // k-th box mode as the starting guess
            w(i) = std::sin((k + 1) * kPi * (i + 1.0) / (np + 1.0));
        w.normalize();
        const double shift = values(k) + 1e-11 * span;
        for (int iter = 0; iter < 4; ++iter)
            w = solve_shifted(shift, w).normalized();
        // nearly degenerate neighbors share an iteration subspace
        if (k > 0 && values(k) - values(k - 1) < 1e-8 * span) {
            w -= vecs.col(k - 1).dot(w) * vecs.col(k - 1);
            w.normalize();
        }
        vecs.col(k) = w;
    }

    MotionalBasis basis;
    basis.kind = PotentialKind::Numeric;
    basis.n_levels = n_levels;
    basis.energies.resize(n_levels);
    basis.x2_diag.resize(n_levels);
    basis.x_elem = Eigen::MatrixXd::Zero(n_levels, n_levels);

    for (int n = 0; n < n_levels; ++n)
        basis.energies[n] = values(n);

    // Eigenvectors are l2-orthonormal, so discrete sums already carry the
    // trapezoidal weight h of the normalized wavefunctions. The solver's
    // arbitrary vector signs are fixed to the convention <n|x|n+1> >= 0.
    Eigen::MatrixXd oriented = vecs.leftCols(n_levels);
    for (int n = 0; n + 1 < n_levels; ++n) {
        const double coupling =
            (oriented.col(n).array() * x.array() * oriented.col(n + 1).array()).sum();
        if (coupling < 0.0)
            oriented.col(n + 1) *= -1.0;
    }
    Eigen::MatrixXd raw_x(n_levels, n_levels);
    Eigen::VectorXd raw_x2(n_levels);
    for (int n = 0; n < n_levels; ++n) {
        for (int m = n; m < n_levels; ++m) {
            const double e = (oriented.col(n).array() * x.array() * oriented.col(m).array()).sum();
            raw_x(n, m) = raw_x(m, n) = e;
        }
        raw_x2(n) = (oriented.col(n).array().square() * x.array().square()).sum();
    }

    const double variance = raw_x2(0) - raw_x(0, 0) * raw_x(0, 0);
    if (!(variance > 0.0))
        throw std::runtime_error("build_numeric: ground state has no spread");
    const double xi = std::sqrt(variance);
    basis.xi_natural = xi;
    for (int n = 0; n < n_levels; ++n) {
        for (int m = 0; m < n_levels; ++m)
            basis.x_elem(n, m) = raw_x(n, m) / xi;
        basis.x2_diag[n] = raw_x2(n) / (xi * xi);
    }

    const double band_edge = v.minCoeff() + 2.0 / (mass * h * h);
    if (basis.energies.back() > 0.9 * band_edge)
        basis.warnings.push_back("highest retained energy within 10% of the finite-difference band edge; refine the grid");
    const double leak = vecs.col(n_levels - 1).head(1).squaredNorm()
                        + vecs.col(n_levels - 1).tail(1).squaredNorm();
    if (leak > 1e-6)
        basis.warnings.push_back("highest retained state touches the grid boundary; widen the grid");
    return basis;
}

std::string basis_to_json(const MotionalBasis& basis) {
    nlohmann::json j;
    j["label"] = to_string(basis.kind);
    nlohmann::json params = nlohmann::json::object();
    if (basis.kind == PotentialKind::Morse)
        params["a"] = basis.morse_a;
    j["parameters"] = params;
    j["energies"] = basis.energies;
    std::vector<std::vector<double>> rows(basis.n_levels);
    for (int n = 0; n < basis.n_levels; ++n) {
        rows[n].resize(basis.n_levels);
        for (int m = 0; m < basis.n_levels; ++m)
            rows[n][m] = basis.x_elem(n, m);
    }
    j["x_elem"] = rows;
    j["x2_diag"] = basis.x2_diag;
    j["xi_natural"] = basis.xi_natural;
    return j.dump(2);
}

MotionalBasis basis_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    MotionalBasis basis;
    const std::string label = j.at("label").get<std::string>();
    if (label == "square_well")
        basis.kind = PotentialKind::SquareWell;
    else if (label == "morse")
        basis.kind = PotentialKind::Morse;
    else if (label == "harmonic")
        basis.kind = PotentialKind::Harmonic;
    else if (label == "numeric")
        basis.kind = PotentialKind::Numeric;
    else
        throw std::invalid_argument("basis_from_json: unknown label '" + label + "'");
    if (j.at("parameters").contains("a"))
        basis.morse_a = j["parameters"]["a"].get<double>();
    basis.energies = j.at("energies").get<std::vector<double>>();
    basis.x2_diag = j.at("x2_diag").get<std::vector<double>>();
    basis.xi_natural = j.at("xi_natural").get<double>();
    const auto rows = j.at("x_elem").get<std::vector<std::vector<double>>>();
    basis.n_levels = static_cast<int>(basis.energies.size());
    if (rows.size() != basis.energies.size() || basis.x2_diag.size() != basis.energies.size())
        throw std::invalid_argument("basis_from_json: inconsistent array sizes");
    basis.x_elem.resize(basis.n_levels, basis.n_levels);
    for (int n = 0; n < basis.n_levels; ++n) {
        if (rows[n].size() != basis.energies.size())
            throw std::invalid_argument("basis_from_json: x_elem is not square");
        for (int m = 0; m < basis.n_levels; ++m)
            basis.x_elem(n, m) = rows[n][m];
    }
    return basis;
}

}  // namespace sideband
