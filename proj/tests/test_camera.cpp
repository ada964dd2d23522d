#include "sgnres/camera.hpp"
#include "sgnres/errors.hpp"
#include "sgnres/processor.hpp"
#include "sgnres/random.hpp"
#include "sgnres/specfun.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace sgnres {
namespace {

constexpr double pi = std::numbers::pi;

using Block = std::array<std::uint32_t, 4>;

// Known-answer vectors for Philox4x32-10 published with the Random123 suite.
TEST(Philox, KnownAnswerZeros)
{
    EXPECT_EQ(Philox4x32(0, 0).generate(0), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerAllOnes)
{
    const std::uint64_t ones = ~std::uint64_t{0};
    EXPECT_EQ(Philox4x32(ones, ones).generate(ones),
              (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPiDigits)
{
    // ctr = {243f6a88, 85a308d3, 13198a2e, 03707344}, key = {a4093822, 299f31d0}.
    const Philox4x32 engine(0x299f31d0a4093822ull, 0x0370734413198a2eull);
    EXPECT_EQ(engine.generate(0x85a308d3243f6a88ull),
              (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreIndependentOfConsumption)
{
    Philox4x32 a(42, 7);
    Philox4x32 b(42, 7);
    Philox4x32 other(42, 8);
    for (int i = 0; i < 10; ++i)
        other();
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(a(), b());
    EXPECT_NE(Philox4x32(42, 7).generate(0), Philox4x32(42, 8).generate(0));
}

TEST(DeriveSeed, DeterministicAndDistinct)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t parent : {0ull, 1ull, 2ull})
        for (std::uint64_t k = 0; k < 1000; ++k)
            seen.insert(derive_seed(parent, k));
    EXPECT_EQ(seen.size(), 3000u);
    static_assert(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST(CameraConfig, Validation)
{
    CameraConfig narrow;
    narrow.n_pixels = 30;  // 6.7 sigma
    EXPECT_THROW(narrow.validate(), ConfigurationError);
    EXPECT_NO_THROW(narrow.validate(0.5));

    CameraConfig even_window;
    even_window.central_columns = 2;
    EXPECT_THROW(even_window.validate(), ConfigurationError);

    CameraConfig even_pixels;
    even_pixels.n_pixels = 100;
    EXPECT_THROW(even_pixels.central_index(), ConfigurationError);
    even_pixels.center_column = 50;
    EXPECT_EQ(even_pixels.central_index(), 50);

    CameraConfig noisy;
    noisy.readout_noise_sd = 7.0;
    noisy.reads_per_column = 3;
    EXPECT_DOUBLE_EQ(noisy.column_noise_sd(), 7.0 * std::sqrt(3.0));
    noisy.readout_noise_sd = -1.0;
    EXPECT_THROW(noisy.validate(), ConfigurationError);
}

TEST(CameraConfig, EdgesAreMirroredAboutCentre)
{
    const CameraConfig camera;
    const auto edges = camera.pixel_edges();
    ASSERT_EQ(edges.size(), 102u);
    for (std::size_t i = 0; i < edges.size(); ++i)
        EXPECT_EQ(edges[i], -edges[edges.size() - 1 - i]);
    EXPECT_NEAR(edges[51] - edges[50], 7.4 / 33.2, 1e-15);
    EXPECT_LT(edges[50], 0.0);
    EXPECT_GT(edges[51], 0.0);
}

// Simpson rule for the filtered Gaussian mixture over one column.
double sgn_column_mass_simpson(double a, double b, double s)
{
    const auto f = [s](double x) {
        const auto j = [](double u) {
            const double d = dawson(u / 2);
            return 2 * std::sqrt(2.0) * d * d / std::pow(pi, 1.5);
        };
        return 0.5 * (j(x - s / 2) + j(x + s / 2));
    };
    const int panels = 2000;
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3;
}

TEST(PixelModel, CentralColumnMatchesIndependentIntegration)
{
    const CameraConfig camera;
    const double w = camera.pixel_width;
    const auto psf = gaussian_psf(1.0);
    for (double s : {0.042, 0.1, 0.18})
    {
        const auto p = pixel_probabilities(sgn_density(psf, s), camera);
        EXPECT_NEAR(p[50] / sgn_column_mass_simpson(-w / 2, w / 2, s), 1.0, 1e-10) << s;
        // Direct: difference of normal CDFs.
        const auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
        const double direct = 0.5 * (Phi(w / 2 - s / 2) - Phi(-w / 2 - s / 2) + Phi(w / 2 + s / 2)
                                     - Phi(-w / 2 + s / 2));
        EXPECT_NEAR(pixel_probabilities(direct_density(psf, s), camera)[50], direct, 1e-14);
    }
}

TEST(PixelModel, FrozenCentralProbabilities)
{
    // Near s = 0 the column mass is alpha (w^3 / 12 + w s^2 / 4).
    const double alpha = 1.0 / std::sqrt(2 * pi * pi * pi);
    const double w = CameraConfig{}.pixel_width;
    EXPECT_NEAR(alpha * w * w * w / 12 / 1.168911061e-4, 1.0, 5e-3);
    const CameraConfig camera;
    const auto psf = gaussian_psf(1.0);
    EXPECT_NEAR(pixel_probabilities(sgn_density(psf, 0.0), camera)[50], 1.168911061e-4, 1e-12);
    EXPECT_NEAR(pixel_probabilities(sgn_density(psf, 0.1), camera)[50], 1.870099017e-4, 1e-12);
}

TEST(PixelModel, AbsorbModeSumsToOneAndIsSymmetric)
{
    const CameraConfig camera;
    const auto psf = gaussian_psf(1.0);
    for (const auto& density : {sgn_density(psf, 0.14), direct_density(psf, 0.14)})
    {
        const auto model = pixel_model(density, camera);
        EXPECT_NEAR(model.coverage, 1.0, 1e-9);
        const double sum = std::accumulate(model.probability.begin(), model.probability.end(), 0.0);
        EXPECT_NEAR(sum, 1.0, 1e-14);
        for (std::size_t i = 0; i < 101; ++i)
        {
            EXPECT_GE(model.probability[i], 0.0);
            EXPECT_NEAR(model.probability[i], model.probability[100 - i], 1e-15);
        }
        // The signum tail piles up in the outer columns.
        if (density.kind() == DensityKind::signum_filtered)
            EXPECT_GT(model.probability[0], 0.01);
    }
}

TEST(PixelModel, TruncateModeRequiresCoverage)
{
    CameraConfig camera;
    camera.edge_mode = EdgeMode::truncate;
    const auto psf = gaussian_psf(1.0);
    // 22.5 sigma of sensor loses ~5% of the filtered mass.
    EXPECT_THROW(pixel_model(sgn_density(psf, 0.1), camera), ConfigurationError);
    const auto model = pixel_model(direct_density(psf, 0.1), camera);
    EXPECT_LT(model.coverage, 1.0);
    EXPECT_NEAR(std::accumulate(model.probability.begin(), model.probability.end(), 0.0), 1.0, 1e-14);
}

TEST(PixelModel, DerivativesMatchFiniteDifferences)
{
    const auto psf = gaussian_psf(1.0);
    for (EdgeMode mode : {EdgeMode::absorb, EdgeMode::truncate})
    {
        CameraConfig camera;
        camera.edge_mode = mode;
        camera.center_offset = 0.05;
        const auto family = direct_family(psf);
        const double s = 0.3;
        const double h = 1e-5;
        const auto model = pixel_model(family.at(s), camera);
        const auto up = pixel_probabilities(family.at(s + h), camera);
        const auto down = pixel_probabilities(family.at(s - h), camera);
        for (std::size_t i = 0; i < up.size(); ++i)
            EXPECT_NEAR(model.probability_ds[i], (up[i] - down[i]) / (2 * h), 1e-9) << i;
    }
}

TEST(Simulation, SameSeedSameScan)
{
    const auto density = sgn_density(gaussian_psf(1.0), 0.1);
    CameraConfig camera;
    camera.readout_noise_sd = 5.0;
    const auto a = simulate_scan(density, camera, 99);
    const auto b = simulate_scan(density, camera, 99);
    const auto c = simulate_scan(density, camera, 100);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_NE(a.counts, c.counts);
    EXPECT_EQ(a.seed, 99u);
    EXPECT_EQ(a.true_s, 0.1);
}

TEST(Simulation, BatchUsesDerivedSeeds)
{
    const auto density = direct_density(gaussian_psf(1.0), 0.1);
    const CameraConfig camera;
    const auto batch = simulate_batch(density, camera, 5, 3);
    ASSERT_EQ(batch.size(), 3u);
    for (std::uint64_t k = 0; k < 3; ++k)
    {
        EXPECT_EQ(batch[k].seed, derive_seed(5, k));
        EXPECT_EQ(batch[k].counts, simulate_scan(density, camera, derive_seed(5, k)).counts);
    }
    EXPECT_THROW(simulate_batch(density, camera, 5, 0), ConfigurationError);
}

TEST(Simulation, CountsAreNonNegativeIntegersWithoutNoise)
{
    const auto scan = simulate_scan(sgn_density(gaussian_psf(1.0), 0.06), CameraConfig{}, 3);
    double total = 0.0;
    for (double c : scan.counts)
    {
        EXPECT_GE(c, 0.0);
        EXPECT_EQ(c, std::floor(c));
        total += c;
    }
    EXPECT_EQ(static_cast<std::uint64_t>(total), scan.n_emitted);
    // Total is Poisson(434000): within 5 standard deviations.
    EXPECT_NEAR(total, 434000.0, 5 * std::sqrt(434000.0));
}

TEST(Simulation, ColumnMeansAndVariancesArePoisson)
{
    const auto density = sgn_density(gaussian_psf(1.0), 0.1);
    CameraConfig camera;
    camera.mean_detections = 20000;
    const auto p = pixel_probabilities(density, camera);
    const int scans = 2000;
    const auto batch = simulate_batch(density, camera, 11, scans);
    for (std::size_t i : {0u, 30u, 45u, 50u, 55u})
    {
        const double mean_expected = camera.mean_detections * p[i];
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& scan : batch)
        {
            sum += scan.counts[i];
            sum_sq += scan.counts[i] * scan.counts[i];
        }
        const double mean = sum / scans;
        const double var = (sum_sq - scans * mean * mean) / (scans - 1);
        EXPECT_NEAR(mean, mean_expected, 4.5 * std::sqrt(mean_expected / scans)) << i;
        // Sample variance of a Poisson count has relative sd about sqrt(2 / n).
        EXPECT_NEAR(var / mean_expected, 1.0, 4.5 * std::sqrt(2.0 / scans) + 1.0 / mean_expected) << i;
    }
}

TEST(Simulation, ReadoutNoiseAddsVariance)
{
    const auto density = direct_density(gaussian_psf(1.0), 0.1);
    CameraConfig camera;
    camera.mean_detections = 1e6;
    camera.readout_noise_sd = 20.0;
    camera.reads_per_column = 4;
    const auto p = pixel_probabilities(density, camera);
    const int scans = 3000;
    const auto batch = simulate_batch(density, camera, 17, scans);
    const std::size_t i = 50;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& scan : batch)
    {
        sum += scan.counts[i];
        sum_sq += scan.counts[i] * scan.counts[i];
    }
    const double mean = sum / scans;
    const double var = (sum_sq - scans * mean * mean) / (scans - 1);
    const double expected = camera.mean_detections * p[i] + 1600.0;
    EXPECT_NEAR(var / expected, 1.0, 4.5 * std::sqrt(2.0 / scans));
}

TEST(Simulation, NoiseIsClampedAtZero)
{
    CameraConfig camera;
    camera.readout_noise_sd = 50.0;
    std::vector<double> p(101, 0.0);
    p[50] = 1.0;
    camera.mean_detections = 1.0;
    const auto scan = simulate_scan(p, camera, 1, 0.0);
    int zeros = 0;
    for (double c : scan.counts)
    {
        EXPECT_GE(c, 0.0);
        zeros += c == 0.0;
    }
    EXPECT_GT(zeros, 30);
}

TEST(CentralStatistic, SumsTheCentralWindow)
{
    ScanRecord scan;
    scan.counts.resize(101);
    std::iota(scan.counts.begin(), scan.counts.end(), 0.0);
    CameraConfig camera;
    EXPECT_EQ(central_statistic(scan, camera), 50.0);
    EXPECT_EQ(central_statistic(scan), 50.0);
    camera.central_columns = 3;
    EXPECT_EQ(central_statistic(scan, camera), 49.0 + 50.0 + 51.0);
    camera.center_column = 10;
    EXPECT_EQ(central_statistic(scan, camera), 9.0 + 10.0 + 11.0);
    scan.counts.pop_back();
    EXPECT_THROW(central_statistic(scan), ConfigurationError);
}

TEST(PixelModel, OneHugePixelTakesEverything)
{
    CameraConfig camera;
    camera.n_pixels = 1;
    camera.pixel_width = 10.0;
    const auto p = pixel_probabilities(sgn_density(gaussian_psf(1.0), 0.3), camera);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], 1.0);
}

TEST(Simulation, LargeCountsFollowColumnProbabilities)
{
    const auto density = sgn_density(gaussian_psf(1.0), 0.1);
    CameraConfig camera;
    camera.mean_detections = 1e8;
    const auto p = pixel_probabilities(density, camera);
    const auto scan = simulate_scan(density, camera, 123);
    const double n = static_cast<double>(scan.n_emitted);
    EXPECT_NEAR(n, 1e8, 5e4);
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        const double se = std::sqrt(p[i] * (1 - p[i]) / n);
        EXPECT_NEAR(scan.counts[i] / n, p[i], 4 * se) << i;
    }
}

TEST(Simulation, PoissonDispersionOverTenThousandScans)
{
    const auto density = direct_density(gaussian_psf(1.0), 0.2);
    CameraConfig camera;
    camera.mean_detections = 1000;
    const auto p = pixel_probabilities(density, camera);
    const auto batch = simulate_batch(density, camera, 2718, 10000);
    int checked = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        if (p[i] < 0.01)
            continue;
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& scan : batch)
        {
            sum += scan.counts[i];
            sum_sq += scan.counts[i] * scan.counts[i];
        }
        const double mean = sum / 10000;
        const double var = (sum_sq - 10000 * mean * mean) / 9999;
        EXPECT_GE(var / mean, 0.9) << i;
        EXPECT_LE(var / mean, 1.1) << i;
        ++checked;
    }
    EXPECT_GT(checked, 10);
}

TEST(Simulation, ZeroSeparationFloorAtCentre)
{
    const auto density = sgn_density(gaussian_psf(1.0), 0.0);
    const CameraConfig camera;
    const double expected = camera.mean_detections * pixel_probabilities(density, camera)[50];
    EXPECT_GT(expected, 40.0);
    const auto batch = simulate_batch(density, camera, 404, 200);
    double sum = 0.0;
    for (const auto& scan : batch)
        sum += central_statistic(scan, camera);
    EXPECT_NEAR(sum / 200, expected, 4 * std::sqrt(expected / 200));
}

TEST(CentralStatistic, TrivialScans)
{
    ScanRecord scan;
    scan.counts.assign(101, 0.0);
    EXPECT_EQ(central_statistic(scan), 0.0);
    scan.counts[50] = 42.0;
    EXPECT_EQ(central_statistic(scan), 42.0);
    EXPECT_EQ(central_statistic(scan, CameraConfig{}), 42.0);
}

TEST(CentralStatistic, GrowsWithSeparation)
{
    const auto psf = gaussian_psf(1.0);
    const CameraConfig camera;
    const auto mean_central = [&](double s) {
        double sum = 0.0;
        for (const auto& scan : simulate_batch(sgn_density(psf, s), camera, 606, 200))
            sum += central_statistic(scan, camera);
        return sum / 200;
    };
    EXPECT_GT(mean_central(0.2), mean_central(0.1));
}

} // namespace
} // namespace sgnres
