#include "sideband/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sideband/linalg.hpp"
#include "sideband/parallel.hpp"

namespace sideband {

double diffusion_coefficient(const LaserParams& p) {
    return p.alpha * p.gamma * p.omega * p.omega * p.eta * p.eta
           / (4.0 * p.normalization());
}

RateCoefficients transition_rates(const MotionalBasis& basis, const LaserParams& p) {
    p.validate();
    const int n = basis.n_levels;
    RateCoefficients rc;
    rc.D = diffusion_coefficient(p);
    rc.A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < n; ++m) {
            if (i == m)
                continue;
            const double w = basis.transition_frequency(i, m);
            const double x2 = basis.x_elem(i, m) * basis.x_elem(i, m);
            rc.A(i, m) = (2.0 * s_func(p, w).real() + rc.D) * x2;
        }
    }
    return rc;
}

Eigen::MatrixXd rate_matrix(const RateCoefficients& rc) {
    const int n = static_cast<int>(rc.A.rows());
    Eigen::MatrixXd m = rc.A;
    std::vector<double> column(n - 1);
    for (int j = 0; j < n; ++j) {
        int k = 0;
        for (int i = 0; i < n; ++i)
            if (i != j)
                column[k++] = rc.A(i, j);
        m(j, j) = -compensated_sum(column);
    }
    return m;
}

double max_column_sum_defect(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    double worst = 0.0;
    std::vector<double> column(n - 1);
    for (int j = 0; j < n; ++j) {
        int k = 0;
        for (int i = 0; i < n; ++i)
            if (i != j)
                column[k++] = m(i, j);
        worst = std::max(worst, std::abs(compensated_sum(column) + m(j, j)));
    }
    return worst;
}

namespace {

// Connected components of the rate graph (edges where either direction has
// a positive rate), for the reducibility diagnostic.
std::vector<int> rate_components(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    std::vector<int> comp(n, -1);
    int next = 0;
    for (int seed = 0; seed < n; ++seed) {
        if (comp[seed] >= 0)
            continue;
        std::vector<int> stack{seed};
        comp[seed] = next;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < n; ++j) {
                if (comp[j] < 0 && i != j && (m(i, j) != 0.0 || m(j, i) != 0.0)) {
                    comp[j] = next;
                    stack.push_back(j);
                }
            }
        }
        ++next;
    }
    return comp;
}

}  // namespace

Populations steady_populations(const Eigen::MatrixXd& rate_mat) {
    const int n = static_cast<int>(rate_mat.rows());
    if (n < 2 || rate_mat.cols() != n)
        throw std::invalid_argument("steady_populations: need a square matrix of size >= 2");
    const double scale = rate_mat.cwiseAbs().maxCoeff();
    if (max_column_sum_defect(rate_mat) > 1e-8 * scale)
        throw std::invalid_argument("steady_populations: column sums of the rate matrix do not vanish");

    const std::vector<int> comp = rate_components(rate_mat);
    if (*std::max_element(comp.begin(), comp.end()) > 0) {
        std::string msg = "steady_populations: rate graph is disconnected; components:";
        const int groups = *std::max_element(comp.begin(), comp.end()) + 1;
        for (int g = 0; g < groups; ++g) {
            msg += " {";
            bool first = true;
            for (int i = 0; i < n; ++i) {
                if (comp[i] == g) {
                    msg += (first ? "" : ",") + std::to_string(i);
                    first = false;
                }
            }
            msg += "}";
        }
        throw std::runtime_error(msg);
    }

    // Row replacement: the rows of the rate matrix are linearly dependent
    // (columns sum to zero), so the normalization can take one row's place.
    Eigen::MatrixXd m = rate_mat;
    m.row(0).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = 1.0;
    Eigen::VectorXd p = m.partialPivLu().solve(rhs);

    const double residual = (rate_mat * p).cwiseAbs().maxCoeff();
    if (!p.allFinite() || residual > 1e-10 * scale)
        throw std::runtime_error("steady_populations: null-space solve failed (residual "
                                 + std::to_string(residual) + ")");

    double low = p.minCoeff();
    if (low < -1e-12)
        throw std::runtime_error("steady_populations: negative population beyond tolerance");
    Populations pops;
    pops.p.resize(n);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        pops.p[i] = std::max(p(i), 0.0);
        norm += pops.p[i];
    }
    double mbar = 0.0;
    for (int i = 0; i < n; ++i) {
        pops.p[i] /= norm;
        mbar += i * pops.p[i];
    }
    pops.mbar = mbar;
    return pops;
}

double top_level_mass(const Populations& pops, double top_fraction) {
    const int n = static_cast<int>(pops.p.size());
    const int top = std::max(1, static_cast<int>(std::ceil(top_fraction * n)));
    double mass = 0.0;
    for (int i = n - top; i < n; ++i)
        mass += pops.p[i];
    return mass;
}

std::vector<CoolingPoint> cooling_curve(const MotionalBasis& basis,
                                        const LaserParams& laser_template,
                                        const std::vector<double>& delta_grid) {
    if (delta_grid.empty())
        throw std::invalid_argument("cooling_curve: empty detuning grid");
    std::vector<CoolingPoint> curve(delta_grid.size());
    parallel_for(delta_grid.size(), [&](std::size_t i) {
        CoolingPoint& pt = curve[i];
        pt.delta = delta_grid[i];
        try {
            LaserParams p = laser_template;
            p.delta = delta_grid[i];
            const Populations pops = steady_populations(rate_matrix(transition_rates(basis, p)));
            pt.mbar = pops.mbar;
            pt.top_mass = top_level_mass(pops);
            pt.converged = pt.top_mass <= 0.01;
        } catch (const std::exception&) {
            pt.mbar = std::numeric_limits<double>::quiet_NaN();
            pt.top_mass = std::numeric_limits<double>::quiet_NaN();
            pt.converged = false;
        }
    });
    return curve;
}

OptimalDetuning optimal_detuning(const std::vector<CoolingPoint>& curve,
                                 const std::function<double(double)>& mbar_of_delta,
                                 double gamma) {
    if (curve.size() < 3)
        throw std::invalid_argument("optimal_detuning: need at least three curve points");
    std::size_t best = curve.size();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!curve[i].converged)
            continue;
        if (best == curve.size() || curve[i].mbar < curve[best].mbar)
            best = i;
    }
    if (best == curve.size())
        throw std::runtime_error("optimal_detuning: no converged points on the curve");

    OptimalDetuning opt;
    if (best == 0 || best + 1 == curve.size()) {
        opt.delta = curve[best].delta;
        opt.mbar = curve[best].mbar;
        opt.at_boundary = true;
        return opt;
    }

    // Golden-section refinement inside the bracketing interval.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = curve[best - 1].delta;
    double b = curve[best + 1].delta;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = mbar_of_delta(x1);
    double f2 = mbar_of_delta(x2);
    while (std::abs(b - a) > 1e-3 * gamma) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = mbar_of_delta(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = mbar_of_delta(x2);
        }
    }
    opt.delta = 0.5 * (a + b);
    opt.mbar = mbar_of_delta(opt.delta);
    if (opt.mbar > curve[best].mbar) {  // refinement never worsens the grid point
        opt.delta = curve[best].delta;
        opt.mbar = curve[best].mbar;
    }
    return opt;
}

OptimalDetuning optimal_detuning(const MotionalBasis& basis,
                                 const LaserParams& laser_template,
                                 const std::vector<CoolingPoint>& curve) {
    auto eval = [&](double delta) {
        LaserParams p = laser_template;
        p.delta = delta;
        return steady_populations(rate_matrix(transition_rates(basis, p))).mbar;
    };
    return optimal_detuning(curve, eval, laser_template.gamma);
}

HarmonicReference harmonic_reference(const LaserParams& p, double nu, int n_levels) {
    p.validate();
    HarmonicReference ref;
    const double d = diffusion_coefficient(p);
    ref.a_plus = 2.0 * s_func(p, -nu).real() + d;
    ref.a_minus = 2.0 * s_func(p, nu).real() + d;
    ref.cooling = ref.a_minus > ref.a_plus;
    if (!ref.cooling) {
        ref.mbar = std::numeric_limits<double>::infinity();
        return ref;
    }
    ref.mbar = ref.a_plus / (ref.a_minus - ref.a_plus);
    ref.populations = thermal_populations(ref.mbar, n_levels);
    return ref;
}

std::vector<double> thermal_populations(double mbar, int n_levels) {
    if (mbar < 0.0 || n_levels < 1)
        throw std::invalid_argument("thermal_populations: invalid arguments");
    std::vector<double> p(n_levels);
    const double ratio = mbar / (mbar + 1.0);
    double value = 1.0 / (mbar + 1.0);
    for (int n = 0; n < n_levels; ++n) {
        p[n] = value;
        value *= ratio;
    }
    return p;
}

ConvergedWell adaptive_square_well(double nu, const LaserParams& p, double tol,
                                   int start_levels, int max_levels) {
    // The infinite well supports no strict truncation limit of mbar: the
    // recoil diffusion D is level-independent while the cooling bias
    // 2 Re s(omega) falls off as 1/omega^3, so the high ladder is an almost
    // unbiased random walk and mbar keeps creeping upward as levels are
    // added (about 3e-5 per level at Doppler parameters). The growth stops
    // at a relative plateau instead: one growth step (>= 8 levels) must move
    // mbar by less than tol * max(1, mbar).
    ConvergedWell out;
    int n = std::max(start_levels, 4);
    out.basis = build_square_well(n, nu);
    out.pops = steady_populations(rate_matrix(transition_rates(out.basis, p)));
    while (n < max_levels) {
        const int grown = std::min(max_levels, n + std::max(8, n / 4));
        MotionalBasis basis = build_square_well(grown, nu);
        Populations pops = steady_populations(rate_matrix(transition_rates(basis, p)));
        const bool stable = std::abs(pops.mbar - out.pops.mbar)
                            < tol * std::max(1.0, std::abs(out.pops.mbar));
        n = grown;
        out.basis = std::move(basis);
        out.pops = std::move(pops);
        if (stable) {
            out.n_levels = n;
            return out;
        }
    }
    throw std::runtime_error("adaptive_square_well: no mbar plateau below the level cap");
}

}  // namespace sideband
