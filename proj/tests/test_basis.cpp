#include <cmath>
#include <cstring>
#include <functional>
#include <vector>

#include <doctest.h>

#include "sideband/basis.hpp"
#include "sideband/specfun.hpp"

using namespace sideband;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Simpson quadrature, independent of any library code.
double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
    const double h = (hi - lo) / panels;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i)
        acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double well_wavefunction(int n, double x) {  // box of length 1 centered at 0
    const double arg = (n + 1) * kPi * x;
    return std::sqrt(2.0) * (n % 2 == 0 ? std::cos(arg) : std::sin(arg));
}

// Morse wavefunctions in kappa = 1 units via the Laguerre recurrence.
double laguerre(int n, double alpha, double z) {
    double l0 = 1.0, l1 = 1.0 + alpha - z;
    if (n == 0)
        return l0;
    for (int k = 2; k <= n; ++k) {
        const double l2 = ((2 * k - 1 + alpha - z) * l1 - (k - 1 + alpha) * l0) / k;
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

double morse_wavefunction(double a, int n, double x) {
    const double z = 2.0 * a * std::exp(-x);
    const double log_norm = 0.5 * (std::log(2.0 * a - 2.0 * n - 1.0)
                                   + std::lgamma(n + 1.0) - std::lgamma(2.0 * a - n));
    return std::exp(log_norm + (a - n - 0.5) * std::log(z) - 0.5 * z)
           * laguerre(n, 2.0 * a - 2.0 * n - 1.0, z);
}

}  // namespace

TEST_CASE("square well energies, parity and scale") {
    const double nu = 0.7;
    const MotionalBasis basis = build_square_well(12, nu);
    for (int n = 0; n < 12; ++n)
        CHECK(basis.energies[n] == doctest::Approx((n + 1.0) * (n + 1.0) * nu));
    // equal-parity selection rule, every pair
    for (int n = 0; n < 12; ++n)
        for (int m = n + 2; m < 12; m += 2)
            CHECK(basis.x_elem(n, m) == 0.0);
    // ground-state variance defines the length unit
    CHECK(basis.x2_diag[0] - basis.x_elem(0, 0) * basis.x_elem(0, 0)
          == doctest::Approx(1.0).epsilon(1e-14));
    // eta = 0.18 kL
    CHECK(basis.xi_natural
          == doctest::Approx(std::sqrt((kPi * kPi - 6.0) / 3.0) / (2.0 * kPi)).epsilon(1e-15));
    CHECK(basis.xi_natural == doctest::Approx(0.18).epsilon(0.005));
    CHECK((basis.x_elem - basis.x_elem.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(build_square_well(1, nu), std::invalid_argument);
}

TEST_CASE("square well matrix elements against wavefunction quadrature") {
    const MotionalBasis basis = build_square_well(8, 1.0);
    for (auto [n, m] : {std::pair{0, 1}, {1, 2}, {0, 3}, {2, 5}}) {
        const double quad = simpson([&](double x) {
            return well_wavefunction(n, x) * x * well_wavefunction(m, x);
        }, -0.5, 0.5, 4000);
        CHECK(basis.x_elem(n, m) * basis.xi_natural == doctest::Approx(quad).epsilon(1e-10));
    }
    // x_01 = 16 L / (9 pi^2)
    CHECK(basis.x_elem(0, 1) * basis.xi_natural
          == doctest::Approx(16.0 / (9.0 * kPi * kPi)).epsilon(1e-14));
    for (int n : {0, 1, 4}) {
        const double quad = simpson([&](double x) {
            const double w = well_wavefunction(n, x);
            return w * x * x * w;
        }, -0.5, 0.5, 4000);
        CHECK(basis.x2_diag[n] * basis.xi_natural * basis.xi_natural
              == doctest::Approx(quad).epsilon(1e-10));
    }
}

TEST_CASE("square well completeness defect falls with truncation") {
    double previous = 1e300;
    for (int n_levels : {10, 20, 50}) {
        const MotionalBasis basis = build_square_well(n_levels, 1.0);
        const double defect = basis.completeness_defect(0) / basis.x2_diag[0];
        CHECK(defect < previous);
        previous = defect;
        if (n_levels >= 50)
            CHECK(defect < 1e-6);
    }
}

TEST_CASE("transition frequencies") {
    const double nu = 2.5;
    const MotionalBasis well = build_square_well(6, nu);
    for (int n = 0; n < 5; ++n)
        CHECK(well.transition_frequency(n, n + 1) == doctest::Approx((2 * n + 3) * nu));
    CHECK(well.transition_frequency(3, 3) == 0.0);
    CHECK_THROWS_AS(well.transition_frequency(0, 6), std::out_of_range);

    const MotionalBasis morse = build_morse(30.0, nu);
    CHECK(morse.transition_frequency(0, 1) == doctest::Approx(29.0 / 30.0 * nu).epsilon(1e-14));
    for (int n = 0; n < 28; ++n)
        CHECK(morse.transition_frequency(n, n + 1)
              == doctest::Approx((30.0 - 1.0 - n) / 30.0 * nu).epsilon(1e-13));
}

TEST_CASE("Morse bound states and level structure") {
    CHECK(morse_bound_states(7.0) == 7);
    CHECK(morse_bound_states(30.0) == 30);
    CHECK(morse_bound_states(7.4) == 7);
    CHECK_THROWS_AS(build_morse(0.4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_morse(7.0, 1.0, 9), std::invalid_argument);

    const MotionalBasis basis = build_morse(7.0, 1.0);
    CHECK(basis.n_levels == 7);
    for (int n = 0; n < 7; ++n) {
        const double half = n + 0.5;
        CHECK(basis.energies[n] == doctest::Approx(half - half * half / 14.0).epsilon(1e-14));
    }
    // <0|x|0> kappa = log(2a) - psi(2a-1); 0.1131 for a = 7
    const double x00 = std::log(14.0) - specfun::digamma(13.0);
    CHECK(x00 == doctest::Approx(0.1131).epsilon(5e-4));
    CHECK(basis.x_elem(0, 0) * basis.xi_natural == doctest::Approx(x00).epsilon(1e-13));
    // xi = sqrt(psi'(2a-1)) in 1/kappa units
    CHECK(basis.xi_natural == doctest::Approx(std::sqrt(specfun::trigamma(13.0))).epsilon(1e-14));
}

TEST_CASE("Morse log-gamma evaluation matches wavefunction quadrature") {
    // both an integer-like and a fractional depth; the fractional case
    // exercises the signed Gamma factors in the binomials
    for (double a : {7.0, 6.3}) {
        const MotionalBasis basis = build_morse(a, 1.0);
        const double xi = basis.xi_natural;
        const int top = basis.n_levels - 1;
        for (auto [n, m] : {std::pair{0, 0}, {0, 1}, {1, 1}, {1, 2}, {0, 3},
                            {2, 2}, {top, top}, {2, top}}) {
            const double quad = simpson([&, n = n, m = m](double x) {
                return morse_wavefunction(a, n, x) * x * morse_wavefunction(a, m, x);
            }, -3.5, 55.0, 60000);
            CHECK(basis.x_elem(n, m) * xi == doctest::Approx(quad).epsilon(1e-8));
        }
        for (int n : {0, 1, 3, top}) {
            const double quad = simpson([&, n = n](double x) {
                const double w = morse_wavefunction(a, n, x);
                return w * x * x * w;
            }, -3.5, 55.0, 60000);
            CHECK(basis.x2_diag[n] * xi * xi == doctest::Approx(quad).epsilon(1e-8));
        }
    }
}

TEST_CASE("Morse diagonal moments survive deep ladders") {
    // mid-ladder diagonals of deep potentials overflow the cancellation
    // budget of the generating-function sums and must come out of the
    // quadrature fallback unharmed
    const double a = 30.0;
    const MotionalBasis basis = build_morse(a, 1.0);
    const double xi = basis.xi_natural;
    for (int n : {10, 13, 20, 29}) {
        const double c = 2.0 * a - 2.0 * n - 1.0;
        const double hi = 40.0 + 95.0 / std::min(1.0, c);
        const double quad_x = simpson([&](double x) {
            const double w = morse_wavefunction(a, n, x);
            return w * x * w;
        }, -2.5, hi, 120000);
        const double quad_x2 = simpson([&](double x) {
            const double w = morse_wavefunction(a, n, x);
            return w * x * x * w;
        }, -2.5, hi, 120000);
        CHECK(basis.x_elem(n, n) * xi == doctest::Approx(quad_x).epsilon(1e-7));
        CHECK(basis.x2_diag[n] * xi * xi == doctest::Approx(quad_x2).epsilon(1e-7));
    }
    // diagonals grow monotonically toward the dissociation edge
    for (int n = 1; n < 30; ++n)
        CHECK(basis.x_elem(n, n) > basis.x_elem(n - 1, n - 1));
}

TEST_CASE("harmonic ladder") {
    const MotionalBasis basis = build_harmonic(8, 1.3);
    CHECK(basis.x_elem(0, 1) == 1.0);
    CHECK(basis.x2_diag[0] == 1.0);
    for (int n = 0; n < 7; ++n) {
        CHECK(basis.transition_frequency(n, n + 1) == doctest::Approx(1.3));
        CHECK(basis.x_elem(n, n + 1) == doctest::Approx(std::sqrt(n + 1.0)));
        CHECK(basis.x_elem(n, n) == 0.0);
    }
    CHECK(basis.x2_diag[5] == doctest::Approx(11.0));
}

TEST_CASE("numeric builder reproduces the analytic bases") {
    std::vector<std::pair<double, double>> harmonic_samples;
    for (int i = 0; i <= 4000; ++i) {
        const double x = -12.0 + 24.0 * i / 4000.0;
        harmonic_samples.push_back({x, 0.5 * x * x});
    }
    const MotionalBasis exact = build_harmonic(6, 1.0);

    SUBCASE("harmonic potential, Richardson-extrapolated to 1e-6") {
        const MotionalBasis coarse = build_numeric(harmonic_samples, 1.0, 6, {-12.0, 12.0, 1501});
        const MotionalBasis fine = build_numeric(harmonic_samples, 1.0, 6, {-12.0, 12.0, 3001});
        for (auto [n, m] : {std::pair{0, 1}, {1, 2}, {2, 3}, {0, 3}}) {
            const double extrapolated =
                (4.0 * fine.x_elem(n, m) - coarse.x_elem(n, m)) / 3.0;
            CHECK(extrapolated == doctest::Approx(exact.x_elem(n, m)).epsilon(1e-6));
            CHECK(fine.x_elem(n, m) == doctest::Approx(exact.x_elem(n, m)).epsilon(1e-4));
        }
        CHECK(fine.x2_diag[0] == doctest::Approx(1.0).epsilon(1e-8));
    }

    SUBCASE("second-order convergence in the grid spacing") {
        const MotionalBasis h1 = build_numeric(harmonic_samples, 1.0, 6, {-12.0, 12.0, 751});
        const MotionalBasis h2 = build_numeric(harmonic_samples, 1.0, 6, {-12.0, 12.0, 1501});
        const double gap_exact = 2.0;
        const double e1 = std::abs(h1.energies[2] - h1.energies[0] - gap_exact);
        const double e2 = std::abs(h2.energies[2] - h2.energies[0] - gap_exact);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    }

    SUBCASE("steep-walled well reproduces the box energies to 1%") {
        std::vector<std::pair<double, double>> samples;
        const double wall = 5e5;
        for (int i = 0; i <= 6000; ++i) {
            const double x = -0.75 + 1.5 * i / 6000.0;
            samples.push_back({x, std::abs(x) < 0.5 ? 0.0 : wall});
        }
        const MotionalBasis numeric = build_numeric(samples, 1.0, 4, {-0.75, 0.75, 3001});
        const MotionalBasis analytic = build_square_well(4, kPi * kPi / 2.0);
        for (int n = 1; n < 4; ++n)
            CHECK(numeric.energies[n] - numeric.energies[0]
                  == doctest::Approx(analytic.energies[n] - analytic.energies[0]).epsilon(0.01));
    }

    SUBCASE("Morse potential, a = 7") {
        std::vector<std::pair<double, double>> samples;
        for (int i = 0; i <= 8000; ++i) {
            const double x = -2.5 + 18.5 * i / 8000.0;
            const double e = 1.0 - std::exp(-x);
            samples.push_back({x, 24.5 * e * e});  // U = a^2/2, kappa = 1 -> nu = 7
        }
        const MotionalBasis numeric = build_numeric(samples, 1.0, 5, {-2.5, 16.0, 2001});
        const MotionalBasis analytic = build_morse(7.0, 7.0, 5);
        for (int n = 1; n < 5; ++n)
            CHECK(numeric.energies[n] - numeric.energies[0]
                  == doctest::Approx(analytic.energies[n] - analytic.energies[0])
                         .epsilon(1e-4 / 7.0 * 10.0));
        CHECK(std::abs(numeric.x_elem(0, 1)) ==
              doctest::Approx(std::abs(analytic.x_elem(0, 1))).epsilon(1e-3));
    }

    SUBCASE("warnings for under-resolved or leaking grids") {
        // grid barely wider than the wavefunctions: the highest retained
        // state touches the boundary
        const MotionalBasis tight = build_numeric(harmonic_samples, 1.0, 8, {-4.0, 4.0, 801});
        bool leak = false;
        for (const std::string& w : tight.warnings)
            leak = leak || w.find("boundary") != std::string::npos;
        CHECK(leak);
        // coarse grid: retained energies run into the finite-difference band
        const MotionalBasis coarse = build_numeric(harmonic_samples, 1.0, 10, {-12.0, 12.0, 41});
        bool band = false;
        for (const std::string& w : coarse.warnings)
            band = band || w.find("band edge") != std::string::npos;
        CHECK(band);
    }

    SUBCASE("error paths") {
        CHECK_THROWS_AS(build_numeric({{0.0, 0.0}, {-1.0, 1.0}}, 1.0, 4, {-1.0, 0.0, 100}),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_numeric(harmonic_samples, 1.0, 4, {-20.0, 20.0, 100}),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_numeric(harmonic_samples, 1.0, 80, {-12.0, 12.0, 100}),
                        std::invalid_argument);
    }
}

TEST_CASE("basis JSON round trip is bit-exact") {
    const MotionalBasis basis = build_morse(7.3, 0.937);
    const std::string text = basis_to_json(basis);
    const MotionalBasis back = basis_from_json(text);
    CHECK(back.kind == basis.kind);
    CHECK(back.n_levels == basis.n_levels);
    CHECK(std::memcmp(&back.xi_natural, &basis.xi_natural, sizeof(double)) == 0);
    for (int n = 0; n < basis.n_levels; ++n) {
        CHECK(std::memcmp(&back.energies[n], &basis.energies[n], sizeof(double)) == 0);
        CHECK(std::memcmp(&back.x2_diag[n], &basis.x2_diag[n], sizeof(double)) == 0);
        for (int m = 0; m < basis.n_levels; ++m) {
            const double a = back.x_elem(n, m), b = basis.x_elem(n, m);
            CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
        }
    }
    CHECK_THROWS_AS(basis_from_json("{\"label\": \"pendulum\"}"), std::invalid_argument);
}
