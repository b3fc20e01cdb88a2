#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sideband/basis.hpp"
#include "sideband/cooling.hpp"
#include "sideband/internal.hpp"
#include "sideband/spectrum.hpp"

namespace sideband {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Task { CoolingCurve, Populations, Spectrum, VerifyInternal, VerifyOracle, VerifyAll };

std::string to_string(Task task);

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int points = 0;
    std::vector<double> linspace() const;
};

struct PotentialSpec {
    PotentialKind kind = PotentialKind::SquareWell;
    double nu = 0.0;        // frequency scale, units of gamma
    double a = 0.0;         // Morse only
    int n_levels = 0;       // 0 = automatic truncation
    // numeric potentials
    double mass = 1.0;
    UniformGrid grid;
    std::vector<std::pair<double, double>> samples;
};

struct RunConfig {
    Task task = Task::Spectrum;
    PotentialSpec potential;
    LaserParams laser;
    GridSpec delta_grid;                  // cooling-curve sweep
    std::optional<GridSpec> omega_grid;   // spectrum grid; default from peaks
    SpectrumMode mode = SpectrumMode::LowIntensity;
    bool psi_average = false;
    std::string csv_path;
    std::string json_path;
    std::string gnuplot_path;

    void validate() const;  // throws ConfigError with field names
};

// JSON round trip of the configuration; parse accepts both a bare config
// object and a metadata document carrying one under "config".
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text);

// Named parameter sets: Doppler and resolved-sideband regimes of the
// square well and the Morse trap, plus a harmonic sideband-cooling reference.
std::vector<std::pair<std::string, RunConfig>> presets();
RunConfig preset(const std::string& name);

// Builds the motional basis a config asks for; automatic truncation grows
// the square well until mbar is stable and takes every Morse bound state.
MotionalBasis resolve_basis(const RunConfig& config, const LaserParams& at_laser);

// Executes the task, writing csv/json artifacts. Returns 0 on success and
// 3 when every point of a sweep failed; configuration problems throw
// ConfigError before anything is written.
int run(const RunConfig& config);

// verify internal: closed forms against resolvent evaluation over random
// parameter sets.
struct InternalVerifyReport {
    double max_r = 0.0;
    double max_s = 0.0;
    double max_q_printed = 0.0;
    double max_q_omega3_scaling = 0.0;  // |q(2w)/8 q(w)| - 1 at small Omega
    bool pass = false;                  // r and s paths agree to 1e-10
};

InternalVerifyReport verify_internal(unsigned seed = 20314, int parameter_sets = 10,
                                     int omega_points = 801);

// verify oracle: rate-equation populations and spectrum-module peaks against
// the brute-force generator.
struct OracleVerifyReport {
    std::vector<double> eta_values;
    std::vector<double> population_l1_errors;
    std::vector<double> peak_position_errors;  // units of the peak width
    std::vector<double> width_errors;          // relative
    bool pass = false;
};

OracleVerifyReport verify_oracle();

std::string oracle_report_to_json(const OracleVerifyReport& report);

// Shortest round-trip decimal formatting used in all CSV output.
std::string format_double(double value);

}  // namespace sideband
