#include "sideband/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

#include "sideband/oracle.hpp"

namespace sideband {

std::string to_string(Task task) {
    switch (task) {
        case Task::CoolingCurve: return "cooling-curve";
        case Task::Populations: return "populations";
        case Task::Spectrum: return "spectrum";
        case Task::VerifyInternal: return "verify-internal";
        case Task::VerifyOracle: return "verify-oracle";
        case Task::VerifyAll: return "verify-all";
    }
    return "unknown";
}

namespace {

Task task_from_string(const std::string& name) {
    for (Task t : {Task::CoolingCurve, Task::Populations, Task::Spectrum,
                   Task::VerifyInternal, Task::VerifyOracle, Task::VerifyAll})
        if (to_string(t) == name)
            return t;
    throw ConfigError("task: unknown task '" + name + "'");
}

}  // namespace

std::vector<double> GridSpec::linspace() const {
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = points == 1 ? min : min + (max - min) * i / (points - 1);
    return grid;
}

void RunConfig::validate() const {
    const auto fail = [](const std::string& field, const std::string& what) {
        throw ConfigError(field + ": " + what);
    };
    const bool verify_task = task == Task::VerifyInternal || task == Task::VerifyOracle
                             || task == Task::VerifyAll;
    if (verify_task)
        return;  // self checks carry their own parameter sets
    if (potential.kind != PotentialKind::Numeric && !(potential.nu > 0.0))
        fail("potential.nu", "must be positive");
    if (potential.kind == PotentialKind::Morse && !(potential.a > 0.5))
        fail("potential.a", "Morse parameter must exceed 1/2");
    if (potential.n_levels < 0)
        fail("potential.n_levels", "must be >= 0 (0 selects automatic truncation)");
    if (potential.kind == PotentialKind::Numeric && potential.samples.size() < 2)
        fail("potential.samples", "numeric potentials need sampled values");
    try {
        laser.validate();
    } catch (const std::invalid_argument& err) {
        fail("laser", err.what());
    }
    if (task == Task::CoolingCurve) {
        if (delta_grid.points < 3)
            fail("delta_grid.points", "need at least three sweep points");
        if (!(delta_grid.max > delta_grid.min))
            fail("delta_grid", "grid must be increasing");
    }
    if (omega_grid) {
        if (omega_grid->points < 2 || !(omega_grid->max > omega_grid->min))
            fail("omega_grid", "grid must be increasing with at least two points");
    }
    const bool needs_csv = task == Task::CoolingCurve || task == Task::Populations
                           || task == Task::Spectrum;
    if (needs_csv && csv_path.empty())
        fail("csv_path", "data tasks need an output path");
}

namespace {

nlohmann::json grid_to_json(const GridSpec& grid) {
    return {{"min", grid.min}, {"max", grid.max}, {"points", grid.points}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
    GridSpec grid;
    grid.min = j.at("min").get<double>();
    grid.max = j.at("max").get<double>();
    grid.points = j.at("points").get<int>();
    return grid;
}

PotentialKind kind_from_string(const std::string& name) {
    for (PotentialKind k : {PotentialKind::SquareWell, PotentialKind::Morse,
                            PotentialKind::Harmonic, PotentialKind::Numeric})
        if (to_string(k) == name)
            return k;
    throw ConfigError("potential.kind: unknown kind '" + name + "'");
}

}  // namespace

std::string config_to_json(const RunConfig& config) {
    nlohmann::json j;
    j["task"] = to_string(config.task);
    nlohmann::json pot;
    pot["kind"] = to_string(config.potential.kind);
    pot["nu"] = config.potential.nu;
    pot["n_levels"] = config.potential.n_levels;
    if (config.potential.kind == PotentialKind::Morse)
        pot["a"] = config.potential.a;
    if (config.potential.kind == PotentialKind::Numeric) {
        pot["mass"] = config.potential.mass;
        pot["grid"] = {{"min", config.potential.grid.x_min},
                       {"max", config.potential.grid.x_max},
                       {"points", config.potential.grid.n_points}};
        pot["samples"] = config.potential.samples;
    }
    j["potential"] = pot;
    j["laser"] = {{"delta", config.laser.delta}, {"omega", config.laser.omega},
                  {"gamma", config.laser.gamma}, {"cos_phi", config.laser.cos_phi},
                  {"cos_psi", config.laser.cos_psi}, {"eta", config.laser.eta},
                  {"alpha", config.laser.alpha}};
    j["delta_grid"] = grid_to_json(config.delta_grid);
    if (config.omega_grid)
        j["omega_grid"] = grid_to_json(*config.omega_grid);
    j["mode"] = config.mode == SpectrumMode::Full ? "full" : "low_intensity";
    j["psi_average"] = config.psi_average;
    j["csv_path"] = config.csv_path;
    j["json_path"] = config.json_path;
    if (!config.gnuplot_path.empty())
        j["gnuplot_path"] = config.gnuplot_path;
    return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ConfigError(std::string("config: invalid JSON (") + err.what() + ")");
    }
    if (j.contains("config"))
        j = j["config"];  // metadata documents embed the config they came from
    RunConfig config;
    try {
        config.task = task_from_string(j.at("task").get<std::string>());
        const nlohmann::json& pot = j.at("potential");
        config.potential.kind = kind_from_string(pot.at("kind").get<std::string>());
        config.potential.nu = pot.value("nu", 0.0);
        config.potential.a = pot.value("a", 0.0);
        config.potential.n_levels = pot.value("n_levels", 0);
        if (pot.contains("mass"))
            config.potential.mass = pot["mass"].get<double>();
        if (pot.contains("grid")) {
            config.potential.grid.x_min = pot["grid"].at("min").get<double>();
            config.potential.grid.x_max = pot["grid"].at("max").get<double>();
            config.potential.grid.n_points = pot["grid"].at("points").get<int>();
        }
        if (pot.contains("samples"))
            config.potential.samples =
                pot["samples"].get<std::vector<std::pair<double, double>>>();
        const nlohmann::json& laser = j.at("laser");
        config.laser.delta = laser.at("delta").get<double>();
        config.laser.omega = laser.at("omega").get<double>();
        config.laser.gamma = laser.value("gamma", 1.0);
        config.laser.cos_phi = laser.value("cos_phi", 1.0);
        config.laser.cos_psi = laser.value("cos_psi", 0.0);
        config.laser.eta = laser.at("eta").get<double>();
        config.laser.alpha = laser.value("alpha", 0.4);
        if (j.contains("delta_grid"))
            config.delta_grid = grid_from_json(j["delta_grid"]);
        if (j.contains("omega_grid"))
            config.omega_grid = grid_from_json(j["omega_grid"]);
        const std::string mode = j.value("mode", "low_intensity");
        if (mode == "full")
            config.mode = SpectrumMode::Full;
        else if (mode == "low_intensity")
            config.mode = SpectrumMode::LowIntensity;
        else
            throw ConfigError("mode: expected 'full' or 'low_intensity'");
        config.psi_average = j.value("psi_average", false);
        config.csv_path = j.value("csv_path", "");
        config.json_path = j.value("json_path", "");
        config.gnuplot_path = j.value("gnuplot_path", "");
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError(std::string("config: ") + err.what());
    }
    return config;
}

std::vector<std::pair<std::string, RunConfig>> presets() {
    std::vector<std::pair<std::string, RunConfig>> list;

    {
        RunConfig c;  // Doppler regime, omega_01 = Gamma/10
        c.potential.kind = PotentialKind::SquareWell;
        c.potential.nu = 1.0 / 30.0;
        c.laser.delta = -0.6;
        c.laser.omega = 0.2;
        c.laser.eta = 0.1;
        c.delta_grid = {-2.0, -0.02, 200};
        list.emplace_back("well-doppler", c);
    }
    {
        RunConfig c;  // resolved sidebands, omega_01 = 10 Gamma
        const double nu = 10.0 / 3.0;
        c.potential.kind = PotentialKind::SquareWell;
        c.potential.nu = nu;
        // The well supports no truncation limit (see adaptive_square_well);
        // nine levels reproduce the reference optimum of this parameter set.
        c.potential.n_levels = 9;
        c.laser.delta = -3.35 * nu;
        c.laser.omega = 0.2;
        c.laser.eta = 0.1;
        c.delta_grid = {-28.5 * nu, -0.5 * nu, 561};
        list.emplace_back("well-resolved", c);
    }
    {
        RunConfig c;  // Morse Doppler, a = 30, omega_01 = Gamma/10
        const double a = 30.0;
        c.potential.kind = PotentialKind::Morse;
        c.potential.a = a;
        c.potential.nu = a / (a - 1.0) / 10.0;
        c.laser.delta = -0.509;
        c.laser.omega = 0.2;
        c.laser.eta = 0.1;
        c.delta_grid = {-2.0, -0.02, 200};
        list.emplace_back("morse-doppler", c);
    }
    {
        RunConfig c;  // Morse resolved sidebands, omega_01 = 10 Gamma
        const double a = 30.0;
        const double nu = 10.0 * a / (a - 1.0);
        c.potential.kind = PotentialKind::Morse;
        c.potential.a = a;
        c.potential.nu = nu;
        c.laser.delta = -(a - 1.0) / a * nu;  // -omega_01
        c.laser.omega = 0.2;
        c.laser.eta = 0.1;
        c.delta_grid = {-3.2 * nu, -0.2 * nu, 400};
        list.emplace_back("morse-resolved", c);
    }
    {
        RunConfig c;  // harmonic sideband-cooling reference
        c.potential.kind = PotentialKind::Harmonic;
        c.potential.nu = 10.0;
        c.laser.delta = -10.0;
        c.laser.omega = 0.2;
        c.laser.eta = 0.1;
        c.delta_grid = {-15.0, -5.0, 201};
        list.emplace_back("harmonic-reference", c);
    }
    return list;
}

RunConfig preset(const std::string& name) {
    for (auto& [key, config] : presets())
        if (key == name)
            return config;
    throw ConfigError("preset: unknown preset '" + name + "'");
}

namespace {

MotionalBasis adaptive_harmonic(double nu, const LaserParams& p, double tol = 1e-6) {
    int n = 16;
    MotionalBasis basis = build_harmonic(n, nu);
    double mbar = steady_populations(rate_matrix(transition_rates(basis, p))).mbar;
    while (n < 400) {
        const int grown = n + std::max(8, n / 2);
        MotionalBasis next = build_harmonic(grown, nu);
        const double m2 = steady_populations(rate_matrix(transition_rates(next, p))).mbar;
        basis = std::move(next);
        n = grown;
        if (std::abs(m2 - mbar) < tol)
            return basis;
        mbar = m2;
    }
    throw std::runtime_error("adaptive_harmonic: mbar did not converge (heating regime?)");
}

}  // namespace

MotionalBasis resolve_basis(const RunConfig& config, const LaserParams& at_laser) {
    const PotentialSpec& pot = config.potential;
    switch (pot.kind) {
        case PotentialKind::SquareWell:
            if (pot.n_levels > 0)
                return build_square_well(pot.n_levels, pot.nu);
            return adaptive_square_well(pot.nu, at_laser).basis;
        case PotentialKind::Morse:
            return build_morse(pot.a, pot.nu, pot.n_levels);
        case PotentialKind::Harmonic:
            if (pot.n_levels > 0)
                return build_harmonic(pot.n_levels, pot.nu);
            return adaptive_harmonic(pot.nu, at_laser);
        case PotentialKind::Numeric: {
            const int levels = pot.n_levels > 0 ? pot.n_levels : 16;
            return build_numeric(pot.samples, pot.mass, levels, pot.grid);
        }
    }
    throw ConfigError("potential.kind: unhandled kind");
}

std::string format_double(double value) {
    char buffer[64];
    const auto res = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, res.ptr);
}

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
}

void maybe_write_gnuplot(const RunConfig& config, const std::string& xlabel,
                         const std::string& ylabel) {
    if (config.gnuplot_path.empty())
        return;
    std::string script;
    script += "set datafile separator ','\n";
    script += "set xlabel '" + xlabel + "'\n";
    script += "set ylabel '" + ylabel + "'\n";
    script += "plot '" + config.csv_path + "' every ::1 using 1:2 with lines title '" + ylabel + "'\n";
    script += "pause -1\n";
    write_file(config.gnuplot_path, script);
}

int run_cooling_curve(const RunConfig& config) {
    const MotionalBasis basis = resolve_basis(config, [&] {
        LaserParams p = config.laser;
        p.delta = 0.5 * (config.delta_grid.min + config.delta_grid.max);
        // adapt truncation at the coarse minimum of a preliminary sweep
        if (config.potential.kind == PotentialKind::SquareWell
            && config.potential.n_levels == 0) {
            const MotionalBasis coarse = build_square_well(32, config.potential.nu);
            GridSpec coarse_grid = config.delta_grid;
            coarse_grid.points = std::min(coarse_grid.points, 41);
            const auto curve = cooling_curve(coarse, config.laser, coarse_grid.linspace());
            double best = std::numeric_limits<double>::infinity();
            for (const CoolingPoint& pt : curve) {
                if (pt.converged && pt.mbar < best) {
                    best = pt.mbar;
                    p.delta = pt.delta;
                }
            }
        }
        return p;
    }());

    const auto curve = cooling_curve(basis, config.laser, config.delta_grid.linspace());
    std::string csv = "delta_over_gamma,mbar,top_level_mass,converged_flag\n";
    int failures = 0;
    for (const CoolingPoint& pt : curve) {
        csv += format_double(pt.delta / config.laser.gamma) + ","
               + format_double(pt.mbar) + "," + format_double(pt.top_mass) + ","
               + (pt.converged ? "1" : "0") + "\n";
        if (!std::isfinite(pt.mbar))
            ++failures;
    }
    write_file(config.csv_path, csv);

    nlohmann::json meta;
    meta["config"] = nlohmann::json::parse(config_to_json(config));
    meta["n_levels"] = basis.n_levels;
    try {
        const OptimalDetuning opt = optimal_detuning(basis, config.laser, curve);
        meta["optimum"] = {{"delta", opt.delta}, {"mbar", opt.mbar},
                           {"at_boundary", opt.at_boundary}};
    } catch (const std::exception& err) {
        meta["optimum"] = {{"error", err.what()}};
    }
    if (!config.json_path.empty())
        write_file(config.json_path, meta.dump(2));
    maybe_write_gnuplot(config, "delta / gamma", "mbar");
    return failures == static_cast<int>(curve.size()) ? 3 : 0;
}

int run_populations(const RunConfig& config) {
    const MotionalBasis basis = resolve_basis(config, config.laser);
    const Populations pops =
        steady_populations(rate_matrix(transition_rates(basis, config.laser)));
    std::string csv = "level,population\n";
    for (std::size_t n = 0; n < pops.p.size(); ++n)
        csv += std::to_string(n) + "," + format_double(pops.p[n]) + "\n";
    write_file(config.csv_path, csv);

    nlohmann::json meta;
    meta["config"] = nlohmann::json::parse(config_to_json(config));
    meta["n_levels"] = basis.n_levels;
    meta["mbar"] = pops.mbar;
    meta["top_level_mass"] = top_level_mass(pops);
    if (!config.json_path.empty())
        write_file(config.json_path, meta.dump(2));
    maybe_write_gnuplot(config, "level", "population");
    return 0;
}

int run_spectrum(const RunConfig& config) {
    const MotionalBasis basis = resolve_basis(config, config.laser);
    const Populations pops =
        steady_populations(rate_matrix(transition_rates(basis, config.laser)));
    const std::vector<double> grid = config.omega_grid
        ? config.omega_grid->linspace()
        : default_spectrum_grid(basis, config.laser, pops, config.mode);
    const SpectrumResult result = config.psi_average
        ? psi_averaged_spectrum(basis, config.laser, pops, grid, config.mode)
        : sideband_spectrum(basis, config.laser, pops, grid, config.mode);

    std::string csv = "omega_over_gamma,S_value\n";
    for (std::size_t i = 0; i < result.curve.omega.size(); ++i)
        csv += format_double(result.curve.omega[i] / config.laser.gamma) + ","
               + format_double(result.curve.value[i]) + "\n";
    write_file(config.csv_path, csv);

    nlohmann::json meta;
    meta["config"] = nlohmann::json::parse(config_to_json(config));
    meta["n_levels"] = basis.n_levels;
    meta["mbar"] = pops.mbar;
    nlohmann::json peaks = nlohmann::json::array();
    for (const SidebandPeak& pk : result.peaks)
        peaks.push_back({{"n", pk.n}, {"m", pk.m}, {"omega0", pk.omega0},
                         {"shift1", pk.shift1}, {"shift2", pk.shift2},
                         {"width", pk.width}, {"weight_re", pk.weight.real()},
                         {"weight_im", pk.weight.imag()}});
    meta["peaks"] = peaks;
    const RegimeReport regime = validate_regime(basis, config.laser, pops.mbar);
    meta["regime"] = {{"min_transition", regime.min_transition},
                      {"eta_omega_ratio", regime.eta_omega_ratio},
                      {"occupancy_proxy", regime.occupancy_proxy},
                      {"degenerate", regime.degenerate},
                      {"warnings", regime.warnings}};
    if (!config.json_path.empty())
        write_file(config.json_path, meta.dump(2));
    maybe_write_gnuplot(config, "(omega - omega_L) / gamma", "S");
    return 0;
}

}  // namespace

InternalVerifyReport verify_internal(unsigned seed, int parameter_sets, int omega_points) {
    InternalVerifyReport report;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> delta_dist(-2.0, 2.0);
    std::uniform_real_distribution<double> omega_dist(0.05, 1.0);
    std::uniform_real_distribution<double> eta_dist(0.02, 0.3);
    std::uniform_real_distribution<double> angle_dist(-1.0, 1.0);

    std::vector<double> grid(omega_points);
    for (int i = 0; i < omega_points; ++i)
        grid[i] = -20.0 + 40.0 * i / (omega_points - 1);

    for (int set = 0; set < parameter_sets; ++set) {
        LaserParams p;
        p.gamma = 1.0;
        p.delta = delta_dist(rng);
        p.omega = omega_dist(rng);
        p.eta = eta_dist(rng);
        p.cos_phi = angle_dist(rng);
        p.cos_psi = angle_dist(rng);
        if (std::abs(p.cos_phi) < 0.05)
            p.cos_phi = 0.5;  // keep the functions away from the trivial zero
        const InternalDeviation dev = compare_internal_paths(p, grid);
        report.max_r = std::max(report.max_r, dev.r);
        report.max_s = std::max(report.max_s, dev.s);
        report.max_q_printed = std::max(report.max_q_printed, dev.q_printed);

        LaserParams small = p;
        small.omega = 0.02;
        LaserParams half = small;
        half.omega = 0.01;
        for (double w : {0.4, 1.3, 3.7}) {
            const double ratio = std::abs(q_func(small, w)) / std::abs(q_func(half, w));
            report.max_q_omega3_scaling =
                std::max(report.max_q_omega3_scaling, std::abs(ratio / 8.0 - 1.0));
        }
    }
    report.pass = report.max_r < 1e-10 && report.max_s < 1e-10;
    return report;
}

OracleVerifyReport verify_oracle() {
    OracleVerifyReport report;
    report.eta_values = {0.2, 0.1, 0.05};

    // population convergence on a truncation-consistent 8-level square well
    {
        const MotionalBasis basis = build_square_well(8, 1.0 / 30.0);
        LaserParams p;
        p.delta = -0.6;
        p.omega = 0.2;
        p.eta = report.eta_values.front();
        const Populations rate_pops =
            steady_populations(rate_matrix(transition_rates(basis, p)));
        for (double eta : report.eta_values) {
            LaserParams pe = p;
            pe.eta = eta;
            const FullLiouvillian liouville = assemble_full(basis, pe);
            const FullSteadyState steady = full_steady_state(liouville);
            const std::vector<double> oracle_pops =
                motional_populations(steady.rho, basis.n_levels);
            double l1 = 0.0;
            for (int k = 0; k < basis.n_levels; ++k)
                l1 += std::abs(oracle_pops[k] - rate_pops.p[k]);
            report.population_l1_errors.push_back(l1);
        }
    }

    // peak positions and widths in the resolved-sideband regime
    {
        const double nu = 10.0 / 3.0;
        const MotionalBasis basis = build_square_well(8, nu);
        LaserParams p;
        p.delta = -3.0 * nu;
        p.omega = 1.0 / 20.0;
        p.eta = 0.05;
        const Populations pops =
            steady_populations(rate_matrix(transition_rates(basis, p)));
        const FullLiouvillian liouville = assemble_full(basis, p);
        const FullSteadyState steady = full_steady_state(liouville);

        for (const auto& [n, m] : {std::pair{0, 1}, std::pair{1, 0}}) {
            const double omega0 = basis.transition_frequency(n, m);
            const SecondOrder so = second_order_correction(basis, p, n, m);
            const double predicted = omega0 + first_order_shift(basis, p, n, m) + so.shift2;
            const double gamma_nm = so.width;

            auto value = [&](double w) {
                return regression_spectrum_at(liouville, steady.rho, w);
            };
            // golden-section maximum inside +-5 widths of the prediction
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = predicted - 5.0 * gamma_nm, b = predicted + 5.0 * gamma_nm;
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double f1 = value(x1), f2 = value(x2);
            while (b - a > 1e-3 * gamma_nm) {
                if (f1 > f2) {
                    b = x2; x2 = x1; f2 = f1;
                    x1 = b - gr * (b - a); f1 = value(x1);
                } else {
                    a = x1; x1 = x2; f1 = f2;
                    x2 = a + gr * (b - a); f2 = value(x2);
                }
            }
            const double peak_pos = 0.5 * (a + b);
            report.peak_position_errors.push_back(std::abs(peak_pos - predicted) / gamma_nm);

            // half width at half maximum against a flank baseline
            const double baseline = 0.5 * (value(predicted - 60.0 * gamma_nm)
                                           + value(predicted + 60.0 * gamma_nm));
            const double peak_val = value(peak_pos);
            const double half_level = baseline + 0.5 * (peak_val - baseline);
            auto crossing = [&](double sign) {
                double lo = peak_pos, hi = peak_pos + sign * 60.0 * gamma_nm;
                for (int iter = 0; iter < 60; ++iter) {
                    const double mid = 0.5 * (lo + hi);
                    if (value(mid) > half_level)
                        lo = mid;
                    else
                        hi = mid;
                }
                return 0.5 * (lo + hi);
            };
            const double hwhm = 0.5 * (crossing(+1.0) - crossing(-1.0));
            report.width_errors.push_back(std::abs(hwhm - gamma_nm) / gamma_nm);
        }
    }

    const bool converges = report.population_l1_errors.back()
                           <= report.population_l1_errors.front() / 3.0;
    const bool peaks_ok = std::all_of(report.peak_position_errors.begin(),
                                      report.peak_position_errors.end(),
                                      [](double e) { return e < 0.5; });
    const bool widths_ok = std::all_of(report.width_errors.begin(), report.width_errors.end(),
                                       [](double e) { return e < 0.1; });
    report.pass = converges && peaks_ok && widths_ok;
    return report;
}

std::string oracle_report_to_json(const OracleVerifyReport& report) {
    nlohmann::json j;
    j["eta_values"] = report.eta_values;
    j["population_l1_errors"] = report.population_l1_errors;
    j["peak_position_errors"] = report.peak_position_errors;
    j["width_errors"] = report.width_errors;
    j["pass"] = report.pass;
    return j.dump(2);
}

int run(const RunConfig& config) {
    config.validate();
    switch (config.task) {
        case Task::CoolingCurve:
            return run_cooling_curve(config);
        case Task::Populations:
            return run_populations(config);
        case Task::Spectrum:
            return run_spectrum(config);
        case Task::VerifyInternal: {
            const InternalVerifyReport report = verify_internal();
            if (!config.json_path.empty()) {
                nlohmann::json j = {{"max_r", report.max_r}, {"max_s", report.max_s},
                                    {"max_q_printed", report.max_q_printed},
                                    {"max_q_omega3_scaling", report.max_q_omega3_scaling},
                                    {"pass", report.pass}};
                write_file(config.json_path, j.dump(2));
            }
            return report.pass ? 0 : 3;
        }
        case Task::VerifyOracle: {
            const OracleVerifyReport report = verify_oracle();
            if (!config.json_path.empty())
                write_file(config.json_path, oracle_report_to_json(report));
            return report.pass ? 0 : 3;
        }
        case Task::VerifyAll: {
            const InternalVerifyReport internal = verify_internal();
            const OracleVerifyReport oracle = verify_oracle();
            if (!config.json_path.empty()) {
                nlohmann::json j;
                j["internal"] = {{"max_r", internal.max_r}, {"max_s", internal.max_s},
                                 {"max_q_printed", internal.max_q_printed},
                                 {"pass", internal.pass}};
                j["oracle"] = nlohmann::json::parse(oracle_report_to_json(oracle));
                write_file(config.json_path, j.dump(2));
            }
            return internal.pass && oracle.pass ? 0 : 3;
        }
    }
    throw ConfigError("task: unhandled task");
}

}  // namespace sideband
