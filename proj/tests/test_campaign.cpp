#include "sgnres/campaign.hpp"
#include "sgnres/commands.hpp"
#include "sgnres/csv.hpp"
#include "sgnres/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

namespace sgnres {
namespace {

ExperimentConfig small_config()
{
    ExperimentConfig config;
    config.n_scans = 6;
    config.s_list = {0.05, 0.1, 0.2};
    config.mean_detections = 50000;
    return config;
}

TEST(Csv, NumbersRoundTripExactly)
{
    for (double v : {0.0, -0.0, 1.0 / 3.0, 434000.0, 1e-300, 6.02214076e23, 0.1 + 0.2})
        EXPECT_EQ(parse_number(format_number(v)), v) << format_number(v);
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_TRUE(std::isinf(parse_number("inf")));
    EXPECT_TRUE(std::isnan(parse_number(format_number(std::nan("")))));
    EXPECT_THROW(parse_number("12abc"), std::invalid_argument);
}

TEST(Csv, TableRoundTripsWithMetadata)
{
    CsvTable table;
    table.metadata = {{"format", "test/1"}, {"seed", "9"}};
    table.header = {"a", "b"};
    table.rows = {{"1", "2.5"}, {"3", "-4"}};
    std::stringstream io;
    write_csv(io, table);
    const auto back = read_csv(io);
    EXPECT_EQ(back.metadata, table.metadata);
    EXPECT_EQ(back.header, table.header);
    EXPECT_EQ(back.rows, table.rows);
    EXPECT_EQ(back.meta("seed"), "9");
    EXPECT_EQ(back.column("b"), 1u);
    EXPECT_THROW(back.column("c"), std::out_of_range);
}

TEST(Csv, RejectsRaggedRows)
{
    std::stringstream io("x,y\n1,2\n3\n");
    EXPECT_THROW(read_csv(io), std::runtime_error);
}

TEST(Csv, ScansRoundTrip)
{
    const auto config = small_config();
    const auto scans = run_campaign(config);
    std::stringstream io;
    write_csv(io, campaign_table(config, scans));
    const auto table = read_csv(io);
    EXPECT_EQ(table.meta("format"), scan_format);
    const auto back = scans_from_table(table);
    ASSERT_EQ(back.size(), scans.size());
    for (std::size_t i = 0; i < scans.size(); ++i)
    {
        EXPECT_EQ(back[i].counts, scans[i].counts);
        EXPECT_EQ(back[i].seed, scans[i].seed);
        EXPECT_EQ(back[i].true_s, scans[i].true_s);
        EXPECT_EQ(back[i].n_emitted, scans[i].n_emitted);
    }
}

TEST(Config, ParsesFileWithCommentsAndDashedKeys)
{
    std::istringstream in("# lab camera\n"
                          "sigma-um = 30\n"
                          "pixel_um=6   # narrower\n"
                          "\n"
                          "s-list = 0.05, 0.1 ,0.2\n"
                          "n_detections = 1e5\n"
                          "seed = 18446744073709551615\n");
    const auto config = parse_config(in);
    EXPECT_EQ(config.sigma_um, 30.0);
    EXPECT_EQ(config.pixel_um, 6.0);
    EXPECT_EQ(config.s_list, (std::vector<double>{0.05, 0.1, 0.2}));
    EXPECT_EQ(config.mean_detections, 1e5);
    EXPECT_EQ(config.seed, ~std::uint64_t{0});
    EXPECT_EQ(config.n_scans, 200);
}

TEST(Config, LaterSettingsOverrideEarlierOnes)
{
    std::istringstream in("n_scans = 10\n");
    ExperimentConfig base;
    base.n_scans = 3;
    base.seed = 4;
    auto config = parse_config(in, base);
    EXPECT_EQ(config.n_scans, 10);
    EXPECT_EQ(config.seed, 4u);
    apply_setting(config, "n-scans", "12");
    EXPECT_EQ(config.n_scans, 12);
}

TEST(Config, RejectsUnknownKeysAndBadValues)
{
    ExperimentConfig config;
    EXPECT_THROW(apply_setting(config, "colour", "red"), ConfigurationError);
    EXPECT_THROW(apply_setting(config, "n_scans", "many"), ConfigurationError);
    EXPECT_THROW(apply_setting(config, "seed", "-1x"), ConfigurationError);
    EXPECT_THROW(apply_setting(config, "seed", "-1"), ConfigurationError);
    EXPECT_THROW(apply_setting(config, "seed", ""), ConfigurationError);
    std::istringstream missing_equals("n_scans 10\n");
    EXPECT_THROW(parse_config(missing_equals), ConfigurationError);
    EXPECT_THROW(parse_list("0.1,,0.2"), ConfigurationError);
}

TEST(Config, ValidationCatchesInconsistentCamera)
{
    auto config = small_config();
    config.n_pixels = 20;  // 20 * 7.4 um < 8 * 33.2 um
    EXPECT_THROW(config.validate(), ConfigurationError);
    config = small_config();
    config.s_list = {-0.1};
    EXPECT_THROW(config.validate(), ConfigurationError);
    config = small_config();
    config.n_scans = 1;
    EXPECT_THROW(config.validate(), ConfigurationError);
}

TEST(Config, CameraIsExpressedInWidthUnits)
{
    ExperimentConfig config;
    config.readout_sd = 7.0;
    config.reads_per_column = 3;
    config.center_offset_um = 3.32;
    const auto camera = config.camera();
    EXPECT_DOUBLE_EQ(camera.pixel_width, 7.4 / 33.2);
    EXPECT_DOUBLE_EQ(camera.center_offset, 0.1);
    EXPECT_EQ(camera.mean_detections, 434000.0);
    EXPECT_DOUBLE_EQ(camera.column_noise_sd(), 7.0 * std::sqrt(3.0));
}

TEST(Config, HashTracksContentNotThreads)
{
    auto a = small_config();
    auto b = small_config();
    EXPECT_EQ(a.hash(), b.hash());
    b.threads = 4;
    b.output_path = "elsewhere.csv";
    EXPECT_EQ(a.hash(), b.hash());
    b.seed = 2;
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(a.canonical(), small_config().canonical());
}

TEST(Campaign, DeterministicAndThreadIndependent)
{
    auto config = small_config();
    const auto serial = run_campaign(config);
    config.threads = 3;
    const auto parallel = run_campaign(config);
    ASSERT_EQ(serial.size(), 18u);
    for (std::size_t i = 0; i < serial.size(); ++i)
    {
        EXPECT_EQ(serial[i].counts, parallel[i].counts);
        EXPECT_EQ(serial[i].seed, parallel[i].seed);
    }
    // Separation-major ordering.
    EXPECT_EQ(serial[0].true_s, 0.05);
    EXPECT_EQ(serial[6].true_s, 0.1);
    EXPECT_EQ(serial[17].true_s, 0.2);
}

TEST(Campaign, SimulateCommandIsByteStable)
{
    const auto config = small_config();
    std::ostringstream first;
    std::ostringstream second;
    write_csv(first, cmd_simulate(config));
    write_csv(second, cmd_simulate(config));
    EXPECT_EQ(first.str(), second.str());
    const auto table = cmd_simulate(config);
    std::ostringstream hex;
    hex << std::hex << config.hash();
    EXPECT_EQ(table.meta("config_hash"), hex.str());
}

TEST(Campaign, AnalysisReportsEverySeparation)
{
    const auto config = small_config();
    const auto scans = run_campaign(config);
    for (auto mode : {CalibrationMode::model, CalibrationMode::scans})
    {
        const auto analysis = analyze_campaign(scans, config, mode);
        ASSERT_EQ(analysis.reports.size(), 3u);
        EXPECT_TRUE(analysis.calibration.valid());
        for (std::size_t j = 0; j < 3; ++j)
        {
            const auto& r = analysis.reports[j];
            EXPECT_EQ(r.stats.s_true, config.s_list[j]);
            EXPECT_EQ(r.stats.n_samples, 6);
            EXPECT_GT(r.crlb_pixelated, 0.0);
            // The direct continuum bound is far weaker at these separations.
            EXPECT_GT(r.crlb_direct, r.crlb_pixelated);
        }
        const auto table = stats_table(analysis);
        EXPECT_EQ(table.header, (std::vector<std::string>{"s_true", "mean", "variance", "bias", "n",
                                                          "crlb_pixelated", "crlb_direct"}));
        EXPECT_EQ(table.rows.size(), 3u);
    }
}

TEST(Campaign, EstimateCommandRoundTripsThroughCsv)
{
    const auto config = small_config();
    std::stringstream io;
    write_csv(io, cmd_simulate(config));
    const auto stats = cmd_estimate(read_csv(io), config, CalibrationMode::model);
    EXPECT_EQ(stats.meta("format"), stats_format);
    ASSERT_EQ(stats.rows.size(), 3u);
    const auto direct = analyze_campaign(run_campaign(config), config, CalibrationMode::model);
    EXPECT_EQ(parse_number(stats.rows[1][stats.column("mean")]), direct.reports[1].stats.mean_estimate);
}

TEST(Commands, DensityProfileBothKinds)
{
    const std::vector<double> s{0.0};
    const auto table = cmd_density_profile(s, CurveKind::both, {-1.0, 1.0, 3});
    ASSERT_EQ(table.rows.size(), 6u);
    EXPECT_EQ(table.rows[0][0], "direct");
    EXPECT_EQ(table.rows[5][0], "sgn");
    // Bright centre without the filter, dark centre with it.
    EXPECT_GT(parse_number(table.rows[1][3]), 0.3);
    EXPECT_EQ(parse_number(table.rows[4][3]), 0.0);
}

TEST(Campaign, ModelCalibrationWorksForFewSeparations)
{
    auto config = small_config();
    config.s_list = {0.1};
    const auto scans = run_campaign(config);
    const auto analysis = analyze_campaign(scans, config, CalibrationMode::model);
    EXPECT_EQ(analysis.calibration.s_grid.size(), 4u);
    EXPECT_EQ(analysis.reports.size(), 1u);
    EXPECT_THROW(analyze_campaign(scans, config, CalibrationMode::scans), FitError);
}

TEST(Commands, FisherCurveColumnsAndCrossing)
{
    const auto table = cmd_fisher_curve(CurveKind::both, {0.0, 2.0, 5});
    EXPECT_EQ(table.header, (std::vector<std::string>{"s", "F_direct", "F_sgn", "F_sgn_asymptote"}));
    ASSERT_EQ(table.rows.size(), 5u);
    EXPECT_EQ(table.rows[0][1], "0");
    EXPECT_NEAR(parse_number(table.meta("crossing_s")), 1.08288, 2e-5);
    EXPECT_EQ(parse_curve_kind("sgn"), CurveKind::sgn);
    EXPECT_THROW(parse_curve_kind("other"), UsageError);
}

TEST(Commands, DensityProfileSampling)
{
    const std::vector<double> s{0.0, 0.2};
    const auto table = cmd_density_profile(s, CurveKind::sgn, {-1.0, 1.0, 21});
    ASSERT_EQ(table.rows.size(), 42u);
    EXPECT_EQ(table.rows[0][table.column("kind")], "sgn");
    const auto p = table.column("p");
    // Dark centre at coincidence, light at finite separation.
    EXPECT_EQ(parse_number(table.rows[10][p]), 0.0);
    // (2 sqrt 2 / pi^1.5) D(0.05)^2 with D(0.05) = 0.0499167.
    EXPECT_NEAR(parse_number(table.rows[31][p]), 1.2656476e-3, 1e-10);
}

} // namespace
} // namespace sgnres
