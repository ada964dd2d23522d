// sgnres: command-line front end for the separation-estimation library.
//
// Every subcommand writes CSV (to --out, or stdout) and a short summary
// table (to stdout when --out is given, otherwise stderr).

#include "sgnres/acceptance.hpp"
#include "sgnres/campaign.hpp"
#include "sgnres/commands.hpp"
#include "sgnres/csv.hpp"
#include "sgnres/errors.hpp"
#include "sgnres/estimator.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace sgnres;

// Experiment flags are collected as raw text and replayed through
// apply_setting() after the config file, so flags always win.
struct ExperimentFlags
{
    std::optional<std::string> config_file;
    std::map<std::string, std::string> values;

    void attach(CLI::App& cmd)
    {
        cmd.add_option_function<std::string>(
               "--config", [this](const std::string& v) { config_file = v; },
               "key = value file; flags override it")
            ->check(CLI::ExistingFile);
        add(cmd, "--sigma-um", "sigma_um", "PSF width in micrometres (33.2)");
        add(cmd, "--pixel-um", "pixel_um", "pixel pitch in micrometres (7.4)");
        add(cmd, "--n-detections", "n_detections", "mean detections per scan (434000)");
        add(cmd, "--n-scans", "n_scans", "scans per separation (200)");
        add(cmd, "--seed", "seed", "campaign seed (1)");
        add(cmd, "--s-list", "s_list", "comma-separated separations in sigma units");
        add(cmd, "--readout-sd", "readout_sd", "readout noise per read, electrons (0)");
        add(cmd, "--reads-per-column", "reads_per_column", "reads binned into each column (1)");
        add(cmd, "--n-pixels", "n_pixels", "sensor columns (101)");
        add(cmd, "--central-columns", "central_columns", "odd number of columns in the statistic (1)");
        add(cmd, "--center-offset-um", "center_offset_um", "sensor offset from the axis (0)");
        add(cmd, "--threads", "threads", "worker threads (1)");
    }

    ExperimentConfig resolve(ExperimentConfig base = {}) const
    {
        if (config_file)
        {
            std::ifstream in(*config_file);
            if (!in)
                throw ConfigurationError("cannot open config file " + *config_file);
            base = parse_config(in, base);
        }
        for (const auto& [key, value] : values)
            apply_setting(base, key, value);
        base.validate();
        return base;
    }

  private:
    void add(CLI::App& cmd, const std::string& flag, const std::string& key, const std::string& help)
    {
        cmd.add_option_function<std::string>(
            flag, [this, key](const std::string& v) { values[key] = v; }, help);
    }
};

void emit(const CsvTable& table, const std::string& out_path, bool quiet)
{
    if (out_path.empty() || out_path == "-")
    {
        write_csv(std::cout, table);
        if (!quiet)
            std::cerr << summarize(table);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw ConfigurationError("cannot write " + out_path);
    write_csv(out, table);
    out.close();
    if (!out)
        throw ConfigurationError("error while writing " + out_path);
    if (!quiet)
        std::cout << summarize(table);
}

CsvTable read_table(const std::string& path)
{
    if (path == "-")
        return read_csv(std::cin);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigurationError("cannot open " + path);
    return read_csv(in);
}

// Rebuilds the campaign configuration recorded in a scan file.
ExperimentConfig config_from_metadata(const CsvTable& table)
{
    ExperimentConfig config;
    const std::string prefix = "config.";
    for (const auto& [key, value] : table.metadata)
        if (key.compare(0, prefix.size(), prefix) == 0)
            apply_setting(config, key.substr(prefix.size()), value);
    return config;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Separation estimation for two incoherent point sources behind a signum filter"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "sgnres 1.0.0");

    std::string out_path;
    bool quiet = false;
    const auto common = [&](CLI::App* cmd) {
        cmd->add_option("--out,-o", out_path, "output CSV path ('-' for stdout)");
        cmd->add_flag("--quiet,-q", quiet, "suppress the summary table");
    };

    // fisher-curve
    auto* fisher = app.add_subcommand("fisher-curve", "Fisher information per detection versus separation");
    std::string fisher_kind = "both";
    CurveRange curve;
    unsigned curve_threads = 1;
    fisher->add_option("--kind", fisher_kind, "direct, sgn or both")->capture_default_str();
    fisher->add_option("--s-min", curve.s_min, "smallest separation (sigma)")->capture_default_str();
    fisher->add_option("--s-max", curve.s_max, "largest separation (sigma)")->capture_default_str();
    fisher->add_option("--points", curve.points, "number of separations")->capture_default_str();
    fisher->add_option("--threads", curve_threads, "worker threads")->capture_default_str();
    common(fisher);

    // density
    auto* density = app.add_subcommand("density", "Detection probability and Fisher density profiles");
    std::string density_kind = "both";
    std::string density_s = "0,0.2,0.5";
    ProfileRange profile;
    density->add_option("--kind", density_kind, "direct, sgn or both")->capture_default_str();
    density->add_option("--s-list", density_s, "separations (sigma)")->capture_default_str();
    density->add_option("--x-min", profile.x_min, "left end of the profile (sigma)")->capture_default_str();
    density->add_option("--x-max", profile.x_max, "right end of the profile (sigma)")->capture_default_str();
    density->add_option("--points", profile.points, "samples per separation")->capture_default_str();
    common(density);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo camera campaign; writes scan CSV");
    ExperimentFlags simulate_flags;
    simulate_flags.attach(*simulate);
    common(simulate);

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Calibrate and evaluate the estimator on a scan CSV");
    ExperimentFlags estimate_flags;
    std::string scans_path;
    std::string calibration = "model";
    estimate->add_option("scans", scans_path, "scan CSV written by 'simulate' ('-' for stdin)")->required();
    estimate->add_option("--calibration", calibration, "model or scans")
        ->check(CLI::IsMember({"model", "scans"}))
        ->capture_default_str();
    estimate_flags.attach(*estimate);
    common(estimate);

    // selftest
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance criteria and report PASS/FAIL");
    AcceptanceOptions acceptance;
    selftest->add_option("--seed", acceptance.seed, "campaign seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (fisher->parsed())
        {
            if (curve.points < 1 || !(curve.s_max >= curve.s_min))
                throw UsageError("fisher-curve: empty separation range");
            emit(cmd_fisher_curve(parse_curve_kind(fisher_kind), curve, curve_threads), out_path, quiet);
        }
        else if (density->parsed())
        {
            const auto s = parse_list(density_s);
            emit(cmd_density_profile(s, parse_curve_kind(density_kind), profile), out_path, quiet);
        }
        else if (simulate->parsed())
        {
            const auto config = simulate_flags.resolve();
            emit(cmd_simulate(config), out_path.empty() ? config.output_path : out_path, quiet);
        }
        else if (estimate->parsed())
        {
            const auto scans = read_table(scans_path);
            const auto config = estimate_flags.resolve(config_from_metadata(scans));
            const auto mode = calibration == "scans" ? CalibrationMode::scans : CalibrationMode::model;
            emit(cmd_estimate(scans, config, mode), out_path.empty() ? config.output_path : out_path,
                 quiet);
        }
        else if (selftest->parsed())
        {
            if (!report_acceptance(std::cout, run_acceptance(acceptance)))
                return 1;
        }
    }
    catch (const UsageError& e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }
    catch (const ConfigurationError& e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
