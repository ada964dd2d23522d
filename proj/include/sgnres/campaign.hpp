#pragma once

#include "sgnres/camera.hpp"
#include "sgnres/csv.hpp"
#include "sgnres/estimator.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sgnres {

/// A Monte Carlo measurement campaign in physical units.  Everything is
/// converted to sigma units by camera() before simulation.
struct ExperimentConfig
{
    double sigma_um = 33.2;
    double pixel_um = 7.4;
    double mean_detections = 434000.0;
    double readout_sd = 0.0;
    int reads_per_column = 1;
    int n_pixels = 101;
    double center_offset_um = 0.0;
    int central_columns = 1;
    // Separations in sigma units.
    std::vector<double> s_list{0.042, 0.06, 0.1, 0.14, 0.18};
    int n_scans = 200;
    std::uint64_t seed = 1;
    std::string output_path;
    unsigned threads = 1;

    // Throws ConfigurationError; s_list must be nonempty, positive and sorted.
    void validate() const;
    CameraConfig camera() const;
    // Stable "key=value" lines of every field that affects results.
    std::string canonical() const;
    // FNV-1a of canonical().
    std::uint64_t hash() const;
};

// Applies "key = value" lines ('#' comments allowed) on top of `base`.
// Unknown keys throw ConfigurationError.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
// Sets one key; shared by the config file reader and command-line flags.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

std::vector<double> parse_list(const std::string& text);

// Scans for every separation of the campaign, separation-major.  Scan k of
// separation j uses derive_seed(derive_seed(seed, j), k).
std::vector<ScanRecord> run_campaign(const ExperimentConfig& config);

CsvTable campaign_table(const ExperimentConfig& config, std::span<const ScanRecord> scans);

enum class CalibrationMode
{
    model,  // expected central counts from the column probabilities
    scans,  // mean central counts of the scans themselves
};

struct SeparationReport
{
    EstimatorStats stats;
    double crlb_pixelated = 0.0;
    double crlb_direct = 0.0;
};

struct CampaignAnalysis
{
    CalibrationCurve calibration;
    std::vector<SeparationReport> reports;
};

// Groups scans by true_s (ascending), calibrates, and evaluates the
// estimator with the pixelated-signum and continuous-direct bounds.  Model
// calibration falls back to the grid {1/4, 1/2, 3/4, 1} x max(true_s) when
// the scans cover fewer than three separations; scan calibration needs three.
CampaignAnalysis analyze_campaign(std::span<const ScanRecord> scans, const ExperimentConfig& config,
                                  CalibrationMode mode);

// Columns: s_true, mean, variance, bias, n, crlb_pixelated, crlb_direct.
CsvTable stats_table(const CampaignAnalysis& analysis);

} // namespace sgnres
