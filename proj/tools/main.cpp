#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sideband/run.hpp"

namespace {

// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct CommonFlags {
    std::string config_path;
    std::string preset_name;
    std::string csv_path;
    std::string json_path;
    std::string gnuplot_path;
    double delta = std::numeric_limits<double>::quiet_NaN();
    double rabi = std::numeric_limits<double>::quiet_NaN();
    double nu = std::numeric_limits<double>::quiet_NaN();
    double eta = std::numeric_limits<double>::quiet_NaN();
    double cos_phi = std::numeric_limits<double>::quiet_NaN();
    double cos_psi = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double morse_a = std::numeric_limits<double>::quiet_NaN();
    int n_levels = -1;
    std::string potential;
    std::string mode;
    bool psi_average = false;
    double grid_min = std::numeric_limits<double>::quiet_NaN();
    double grid_max = std::numeric_limits<double>::quiet_NaN();
    int grid_points = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file; flags override its values");
    cmd->add_option("--preset", flags.preset_name, "named parameter set (see `presets`)");
    cmd->add_option("--delta", flags.delta, "detuning Delta/Gamma");
    cmd->add_option("--rabi", flags.rabi, "Rabi frequency Omega/Gamma");
    cmd->add_option("--nu", flags.nu, "trap frequency nu/Gamma");
    cmd->add_option("--eta", flags.eta, "Lamb-Dicke parameter");
    cmd->add_option("--cos-phi", flags.cos_phi, "laser angle cosine");
    cmd->add_option("--cos-psi", flags.cos_psi, "detector angle cosine");
    cmd->add_option("--alpha", flags.alpha, "radiation-pattern second moment");
    cmd->add_option("--morse-a", flags.morse_a, "Morse parameter a");
    cmd->add_option("--n-levels", flags.n_levels, "retained levels (0 = automatic)");
    cmd->add_option("--potential", flags.potential, "square_well | morse | harmonic");
    cmd->add_option("--mode", flags.mode, "low_intensity | full");
    cmd->add_flag("--psi-average", flags.psi_average, "average the spectrum over the detection angle");
    cmd->add_option("--grid-min", flags.grid_min, "sweep/spectrum grid minimum");
    cmd->add_option("--grid-max", flags.grid_max, "sweep/spectrum grid maximum");
    cmd->add_option("--grid-points", flags.grid_points, "sweep/spectrum grid points");
    cmd->add_option("--out-csv", flags.csv_path, "CSV output path");
    cmd->add_option("--out-json", flags.json_path, "metadata/peaks JSON output path");
    cmd->add_option("--gnuplot", flags.gnuplot_path, "emit a gnuplot script referencing the CSV");
}

sideband::RunConfig build_config(const CommonFlags& flags, sideband::Task task) {
    sideband::RunConfig config;
    bool have_base = false;
    if (!flags.preset_name.empty()) {
        config = sideband::preset(flags.preset_name);
        have_base = true;
    }
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in)
            throw sideband::ConfigError("config: cannot open '" + flags.config_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        config = sideband::config_from_json(text.str());
        have_base = true;
    }
    config.task = task;
    if (!flags.potential.empty()) {
        if (flags.potential == "square_well")
            config.potential.kind = sideband::PotentialKind::SquareWell;
        else if (flags.potential == "morse")
            config.potential.kind = sideband::PotentialKind::Morse;
        else if (flags.potential == "harmonic")
            config.potential.kind = sideband::PotentialKind::Harmonic;
        else
            throw sideband::ConfigError("potential: unknown kind '" + flags.potential + "'");
        have_base = true;
    }
    if (!have_base && (task == sideband::Task::CoolingCurve
                       || task == sideband::Task::Populations
                       || task == sideband::Task::Spectrum))
        throw sideband::ConfigError("config: provide --preset, --config or --potential");

    if (!std::isnan(flags.delta))
        config.laser.delta = flags.delta;
    if (!std::isnan(flags.rabi))
        config.laser.omega = flags.rabi;
    if (!std::isnan(flags.nu))
        config.potential.nu = flags.nu;
    if (!std::isnan(flags.eta))
        config.laser.eta = flags.eta;
    if (!std::isnan(flags.cos_phi))
        config.laser.cos_phi = flags.cos_phi;
    if (!std::isnan(flags.cos_psi))
        config.laser.cos_psi = flags.cos_psi;
    if (!std::isnan(flags.alpha))
        config.laser.alpha = flags.alpha;
    if (!std::isnan(flags.morse_a))
        config.potential.a = flags.morse_a;
    if (flags.n_levels >= 0)
        config.potential.n_levels = flags.n_levels;
    if (!flags.mode.empty()) {
        if (flags.mode == "full")
            config.mode = sideband::SpectrumMode::Full;
        else if (flags.mode == "low_intensity")
            config.mode = sideband::SpectrumMode::LowIntensity;
        else
            throw sideband::ConfigError("mode: expected 'full' or 'low_intensity'");
    }
    if (flags.psi_average)
        config.psi_average = true;
    if (task == sideband::Task::CoolingCurve) {
        if (!std::isnan(flags.grid_min))
            config.delta_grid.min = flags.grid_min;
        if (!std::isnan(flags.grid_max))
            config.delta_grid.max = flags.grid_max;
        if (flags.grid_points > 0)
            config.delta_grid.points = flags.grid_points;
    } else if (task == sideband::Task::Spectrum) {
        if (!std::isnan(flags.grid_min) || !std::isnan(flags.grid_max) || flags.grid_points > 0) {
            sideband::GridSpec grid = config.omega_grid.value_or(sideband::GridSpec{0, 0, 0});
            if (!std::isnan(flags.grid_min))
                grid.min = flags.grid_min;
            if (!std::isnan(flags.grid_max))
                grid.max = flags.grid_max;
            if (flags.grid_points > 0)
                grid.points = flags.grid_points;
            config.omega_grid = grid;
        }
    }
    if (!flags.csv_path.empty())
        config.csv_path = flags.csv_path;
    if (config.csv_path.empty())
        config.csv_path = sideband::to_string(task) + ".csv";
    if (!flags.json_path.empty())
        config.json_path = flags.json_path;
    if (config.json_path.empty())
        config.json_path = sideband::to_string(task) + ".json";
    if (!flags.gnuplot_path.empty())
        config.gnuplot_path = flags.gnuplot_path;
    return config;
}

int dispatch(const sideband::RunConfig& config) {
    try {
        const int status = sideband::run(config);
        if (status == 0)
            std::printf("wrote %s\n", config.csv_path.empty() ? config.json_path.c_str()
                                                              : config.csv_path.c_str());
        return status;
    } catch (const sideband::ConfigError& err) {
        std::fprintf(stderr, "config error: %s\n", err.what());
        return kConfigError;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kNumericalError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laser-cooling steady states and motional sideband spectra of a "
                 "trapped two-level atom in a non-harmonic potential"};
    app.require_subcommand(1);

    CommonFlags cooling_flags, pop_flags, spectrum_flags;
    CLI::App* cooling = app.add_subcommand("cooling-curve", "mean occupation against detuning");
    add_common_flags(cooling, cooling_flags);
    CLI::App* pops = app.add_subcommand("populations", "steady-state level populations");
    add_common_flags(pops, pop_flags);
    CLI::App* spectrum = app.add_subcommand("spectrum", "motional sideband spectrum");
    add_common_flags(spectrum, spectrum_flags);

    std::string verify_what = "all";
    std::string verify_json;
    CLI::App* verify = app.add_subcommand("verify", "self checks: internal | oracle | all");
    verify->add_option("what", verify_what, "internal | oracle | all");
    verify->add_option("--out-json", verify_json, "report output path");

    CLI::App* preset_cmd = app.add_subcommand("presets", "list the named parameter sets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cooling->parsed())
            return dispatch(build_config(cooling_flags, sideband::Task::CoolingCurve));
        if (pops->parsed())
            return dispatch(build_config(pop_flags, sideband::Task::Populations));
        if (spectrum->parsed())
            return dispatch(build_config(spectrum_flags, sideband::Task::Spectrum));
        if (verify->parsed()) {
            sideband::RunConfig config;
            if (verify_what == "internal")
                config.task = sideband::Task::VerifyInternal;
            else if (verify_what == "oracle")
                config.task = sideband::Task::VerifyOracle;
            else if (verify_what == "all")
                config.task = sideband::Task::VerifyAll;
            else {
                std::fprintf(stderr, "config error: verify expects internal|oracle|all\n");
                return kConfigError;
            }
            config.json_path = verify_json;
            if (config.task != sideband::Task::VerifyOracle) {
                const auto internal = sideband::verify_internal();
                std::printf("internal: max|r_closed/r_resolvent - 1| = %.3e\n", internal.max_r);
                std::printf("internal: max|s_closed/s_resolvent - 1| = %.3e\n", internal.max_s);
                std::printf("internal: max deviation of the quoted closed q form = %.3e "
                            "(inconsistent transcription; production q is resolvent-based)\n",
                            internal.max_q_printed);
                std::printf("internal: q ~ Omega^3 scaling defect = %.3e\n",
                            internal.max_q_omega3_scaling);
            }
            return dispatch(config);
        }
        if (preset_cmd->parsed()) {
            for (const auto& [name, config] : sideband::presets()) {
                std::printf("%-20s potential=%s nu/G=%g delta/G=%g omega/G=%g eta=%g\n",
                            name.c_str(), sideband::to_string(config.potential.kind).c_str(),
                            config.potential.nu, config.laser.delta, config.laser.omega,
                            config.laser.eta);
            }
            return 0;
        }
    } catch (const sideband::ConfigError& err) {
        std::fprintf(stderr, "config error: %s\n", err.what());
        return kConfigError;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kNumericalError;
    }
    return 0;
}
