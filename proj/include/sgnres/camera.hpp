#pragma once

#include "sgnres/psf.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sgnres {

enum class EdgeMode
{
    // The outermost columns also collect everything beyond the sensor, so
    // every detection lands in some column.
    absorb,
    // Out-of-sensor detections are lost; probabilities are conditioned on
    // landing on the sensor, which must capture at least 1 - 1e-3 of the mass.
    truncate,
};

/// Column-collapsed photon-counting camera.  Lengths in sigma units.
struct CameraConfig
{
    double pixel_width = 7.4 / 33.2;
    int n_pixels = 101;
    // Offset of the sensor centre from the optical axis.
    double center_offset = 0.0;
    // Mean number of detections per scan (N).
    double mean_detections = 434000.0;
    // Readout noise per read, electrons.
    double readout_noise_sd = 0.0;
    // Independent reads binned into one column value; the column noise is
    // readout_noise_sd * sqrt(reads_per_column).
    int reads_per_column = 1;
    // Columns summed into the central statistic (odd).
    int central_columns = 1;
    // Explicit central column; required when n_pixels is even.
    std::optional<int> center_column;
    EdgeMode edge_mode = EdgeMode::absorb;

    // Throws ConfigurationError.  The grid must span at least 8 sigma.
    void validate(double sigma = 1.0) const;

    // n_pixels + 1 finite edges, left to right.
    std::vector<double> pixel_edges() const;
    // Index of the column the central statistic is centred on.
    int central_index() const;
    double column_noise_sd() const;
};

struct ScanRecord
{
    std::vector<double> counts;
    std::uint64_t seed = 0;
    double true_s = 0.0;
    std::uint64_t n_emitted = 0;
};

/// Column probabilities with their s-derivatives.
struct PixelModel
{
    std::vector<double> probability;
    std::vector<double> probability_ds;
    // Mass captured before renormalisation.
    double coverage = 0.0;
};

PixelModel pixel_model(const DetectionDensity& density, const CameraConfig& camera);

// P_i = integral of p(x|s) over column i, renormalised to sum to 1.
std::vector<double> pixel_probabilities(const DetectionDensity& density, const CameraConfig& camera);

// Independent Poisson counts per column with mean N P_i, then Gaussian
// readout noise clamped at zero.  Deterministic in seed.
ScanRecord simulate_scan(const DetectionDensity& density, const CameraConfig& camera,
                         std::uint64_t seed);
ScanRecord simulate_scan(std::span<const double> probabilities, const CameraConfig& camera,
                         std::uint64_t seed, double true_s);

// Scans seeded with derive_seed(base_seed, k), k = 0 .. n_scans-1.
std::vector<ScanRecord> simulate_batch(const DetectionDensity& density, const CameraConfig& camera,
                                       std::uint64_t base_seed, int n_scans);

// Counts in the central column (or the central_columns columns around it).
double central_statistic(const ScanRecord& scan, const CameraConfig& camera);
// Single central column of an odd-length scan.
double central_statistic(const ScanRecord& scan);

} // namespace sgnres
