#include "sgnres/camera.hpp"

#include "sgnres/errors.hpp"
#include "sgnres/random.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace sgnres {

namespace {

// Stream ids within one scan seed; column index goes in the low bits.
constexpr std::uint64_t shot_stream = 0;
constexpr std::uint64_t readout_stream = std::uint64_t{1} << 32;

} // namespace

void CameraConfig::validate(double sigma) const
{
    std::ostringstream msg;
    if (!(pixel_width > 0.0) || !std::isfinite(pixel_width))
        msg << "pixel_width must be positive; ";
    if (n_pixels < 1)
        msg << "n_pixels must be >= 1; ";
    else if (pixel_width * n_pixels < 8.0 * sigma)
        msg << "pixel grid spans " << pixel_width * n_pixels << " < 8 sigma; ";
    if (!(mean_detections > 0.0) || !std::isfinite(mean_detections))
        msg << "mean_detections must be positive; ";
    if (!(readout_noise_sd >= 0.0))
        msg << "readout_noise_sd must be >= 0; ";
    if (reads_per_column < 1)
        msg << "reads_per_column must be >= 1; ";
    if (central_columns < 1 || central_columns % 2 == 0)
        msg << "central_columns must be a positive odd number; ";
    if (!std::isfinite(center_offset))
        msg << "center_offset must be finite; ";
    if (center_column && (*center_column < 0 || *center_column >= n_pixels))
        msg << "center_column out of range; ";
    const auto text = msg.str();
    if (!text.empty())
        throw ConfigurationError("CameraConfig: " + text.substr(0, text.size() - 2));
}

std::vector<double> CameraConfig::pixel_edges() const
{
    std::vector<double> edges(static_cast<std::size_t>(n_pixels) + 1);
    // Edges are placed symmetrically from the centre so a centred camera has
    // exactly mirrored columns.
    const double half = 0.5 * n_pixels;
    for (int i = 0; i <= n_pixels; ++i)
        edges[static_cast<std::size_t>(i)] = center_offset + (i - half) * pixel_width;
    return edges;
}

int CameraConfig::central_index() const
{
    if (center_column)
        return *center_column;
    if (n_pixels % 2 == 0)
        throw ConfigurationError(
            "CameraConfig: even n_pixels requires an explicit center_column");
    return n_pixels / 2;
}

double CameraConfig::column_noise_sd() const
{
    return readout_noise_sd * std::sqrt(static_cast<double>(reads_per_column));
}

//---------------------------------------------------------------------------//

PixelModel pixel_model(const DetectionDensity& density, const CameraConfig& camera)
{
    camera.validate(density.psf().sigma());
    auto edges = camera.pixel_edges();
    if (camera.edge_mode == EdgeMode::absorb)
    {
        edges.front() = -std::numeric_limits<double>::infinity();
        edges.back() = std::numeric_limits<double>::infinity();
    }

    const std::size_t n = static_cast<std::size_t>(camera.n_pixels);
    PixelModel model;
    model.probability.resize(n);
    model.probability_ds.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        model.probability[i] = density.mass(edges[i], edges[i + 1]);
        model.probability_ds[i] = density.mass_ds(edges[i], edges[i + 1]);
    }
    const double total = std::accumulate(model.probability.begin(), model.probability.end(), 0.0);
    const double total_ds =
        std::accumulate(model.probability_ds.begin(), model.probability_ds.end(), 0.0);
    model.coverage = total;

    if (!(total > 0.0))
        throw ConfigurationError("pixel_model: all column probabilities are zero");
    if (camera.edge_mode == EdgeMode::truncate && total < 1.0 - 1e-3)
    {
        std::ostringstream msg;
        msg << "pixel_model: sensor captures only " << total
            << " of the detection mass (need >= 1 - 1e-3)";
        throw ConfigurationError(msg.str());
    }
    if (camera.edge_mode == EdgeMode::absorb && std::abs(total - 1.0) > 1e-6)
    {
        std::ostringstream msg;
        msg << "pixel_model: column masses sum to " << total << ", expected 1 within 1e-6";
        throw NumericalError(msg.str());
    }

    // Conditioning on detection: P_i = q_i / T, dP_i = (dq_i - P_i dT) / T.
    for (std::size_t i = 0; i < n; ++i)
    {
        model.probability[i] /= total;
        model.probability_ds[i] = (model.probability_ds[i] - model.probability[i] * total_ds) / total;
    }
    return model;
}

std::vector<double> pixel_probabilities(const DetectionDensity& density, const CameraConfig& camera)
{
    return pixel_model(density, camera).probability;
}

ScanRecord simulate_scan(std::span<const double> probabilities, const CameraConfig& camera,
                         std::uint64_t seed, double true_s)
{
    camera.validate();
    if (probabilities.size() != static_cast<std::size_t>(camera.n_pixels))
        throw ConfigurationError("simulate_scan: probability vector does not match n_pixels");

    ScanRecord scan;
    scan.seed = seed;
    scan.true_s = true_s;
    scan.counts.resize(probabilities.size());
    const double noise_sd = camera.column_noise_sd();
    for (std::size_t i = 0; i < probabilities.size(); ++i)
    {
        const double mean = camera.mean_detections * probabilities[i];
        std::uint64_t hits = 0;
        if (mean > 0.0)
        {
            Philox4x32 engine(seed, shot_stream | i);
            boost::random::poisson_distribution<std::int64_t, double> poisson(mean);
            hits = static_cast<std::uint64_t>(poisson(engine));
        }
        scan.n_emitted += hits;
        double value = static_cast<double>(hits);
        if (noise_sd > 0.0)
        {
            Philox4x32 engine(seed, readout_stream | i);
            boost::random::normal_distribution<double> normal(0.0, noise_sd);
            value = std::max(0.0, value + normal(engine));
        }
        scan.counts[i] = value;
    }
    return scan;
}

ScanRecord simulate_scan(const DetectionDensity& density, const CameraConfig& camera,
                         std::uint64_t seed)
{
    const auto p = pixel_probabilities(density, camera);
    return simulate_scan(p, camera, seed, density.separation());
}

std::vector<ScanRecord> simulate_batch(const DetectionDensity& density, const CameraConfig& camera,
                                       std::uint64_t base_seed, int n_scans)
{
    if (n_scans < 1)
        throw ConfigurationError("simulate_batch: n_scans must be >= 1");
    const auto p = pixel_probabilities(density, camera);
    std::vector<ScanRecord> scans;
    scans.reserve(static_cast<std::size_t>(n_scans));
    for (int k = 0; k < n_scans; ++k)
        scans.push_back(simulate_scan(p, camera, derive_seed(base_seed, static_cast<std::uint64_t>(k)),
                                      density.separation()));
    return scans;
}

double central_statistic(const ScanRecord& scan, const CameraConfig& camera)
{
    if (scan.counts.size() != static_cast<std::size_t>(camera.n_pixels))
        throw ConfigurationError("central_statistic: scan length does not match camera");
    const int centre = camera.central_index();
    const int half = camera.central_columns / 2;
    if (centre - half < 0 || centre + half >= camera.n_pixels)
        throw ConfigurationError("central_statistic: central window exceeds the sensor");
    double sum = 0.0;
    for (int i = centre - half; i <= centre + half; ++i)
        sum += scan.counts[static_cast<std::size_t>(i)];
    return sum;
}

double central_statistic(const ScanRecord& scan)
{
    const auto n = scan.counts.size();
    if (n % 2 == 0)
        throw ConfigurationError(
            "central_statistic: even column count needs an explicit central column");
    return scan.counts[n / 2];
}

} // namespace sgnres
