#include "sgnres/commands.hpp"

#include "sgnres/errors.hpp"
#include "sgnres/fisher.hpp"
#include "sgnres/processor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sgnres {

namespace {

const double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linear_grid(double lo, double hi, int points)
{
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] =
            points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    return grid;
}

double information_gap(const DensityFamily& sgn, const DensityFamily& direct, double s)
{
    return fisher_continuous(sgn, s).value - fisher_continuous(direct, s).value;
}

} // namespace

CurveKind parse_curve_kind(const std::string& text)
{
    if (text == "direct")
        return CurveKind::direct;
    if (text == "sgn")
        return CurveKind::sgn;
    if (text == "both")
        return CurveKind::both;
    throw UsageError("kind must be one of direct, sgn, both (got '" + text + "')");
}

double fisher_crossing(double lo, double hi)
{
    const auto psf = gaussian_psf(1.0);
    const auto sgn = signum_family(psf);
    const auto direct = direct_family(psf);
    double g_lo = information_gap(sgn, direct, lo);
    const double g_hi = information_gap(sgn, direct, hi);
    if (g_lo * g_hi > 0.0)
        throw NumericalError("fisher_crossing: no sign change in the bracket");
    for (int it = 0; it < 100 && hi - lo > 1e-12; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        const double g = information_gap(sgn, direct, mid);
        if ((g > 0.0) == (g_lo > 0.0))
        {
            lo = mid;
            g_lo = g;
        }
        else
        {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

CsvTable cmd_fisher_curve(CurveKind kind, const CurveRange& range, unsigned threads)
{
    if (range.points < 1 || !(range.s_max >= range.s_min) || range.s_min < 0.0
        || (range.points > 1 && range.s_max == range.s_min))
        throw UsageError("fisher-curve: empty or invalid separation range");

    const auto psf = gaussian_psf(1.0);
    const auto s = linear_grid(range.s_min, range.s_max, range.points);
    std::vector<FisherResult> direct;
    std::vector<FisherResult> sgn;
    if (kind != CurveKind::sgn)
        direct = fisher_curve(direct_family(psf), s, threads);
    if (kind != CurveKind::direct)
        sgn = fisher_curve(signum_family(psf), s, threads);

    CsvTable table;
    table.metadata.emplace_back("format", fisher_format);
    table.metadata.emplace_back("units", "sigma; information per detection");
    table.metadata.emplace_back("kind", kind == CurveKind::both     ? "both"
                                        : kind == CurveKind::direct ? "direct"
                                                                    : "sgn");
    table.header = {"s", "F_direct", "F_sgn", "F_sgn_asymptote"};
    std::size_t sign_change = s.size();
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        const double fd = direct.empty() ? nan : direct[i].value;
        const double fs = sgn.empty() ? nan : sgn[i].value;
        const double fa = sgn.empty() ? nan : fisher_sgn_asymptote(s[i]).value;
        table.rows.push_back({format_number(s[i]), format_number(fd), format_number(fs),
                              format_number(fa)});
        if (kind == CurveKind::both && i > 0 && sign_change == s.size() && s[i - 1] > 0.0
            && (sgn[i - 1].value - direct[i - 1].value) * (fs - fd) <= 0.0)
            sign_change = i;
    }
    if (sign_change < s.size())
        table.metadata.emplace_back("crossing_s",
                                    format_number(fisher_crossing(s[sign_change - 1], s[sign_change])));
    return table;
}

CsvTable cmd_density_profile(std::span<const double> s_list, CurveKind kind, const ProfileRange& range)
{
    if (s_list.empty())
        throw UsageError("density: no separations given");
    if (range.points < 2 || !(range.x_max > range.x_min))
        throw UsageError("density: invalid x range");

    const auto psf = gaussian_psf(1.0);
    std::vector<DensityFamily> families;
    if (kind != CurveKind::sgn)
        families.push_back(direct_family(psf));
    if (kind != CurveKind::direct)
        families.push_back(signum_family(psf));
    const auto xs = linear_grid(range.x_min, range.x_max, range.points);

    CsvTable table;
    table.metadata.emplace_back("format", density_format);
    table.metadata.emplace_back("units", "sigma");
    table.header = {"kind", "s", "x", "p", "fisher_density"};
    for (const auto& family : families)
        for (double s : s_list)
        {
            const DetectionDensity density = family.at(s);
            for (double x : xs)
                table.rows.push_back({to_string(family.kind()), format_number(s), format_number(x),
                                      format_number(density(x)),
                                      format_number(fisher_density(density, x))});
        }
    return table;
}

CsvTable cmd_simulate(const ExperimentConfig& config)
{
    const auto scans = run_campaign(config);
    return campaign_table(config, scans);
}

CsvTable cmd_estimate(const CsvTable& scans_csv, const ExperimentConfig& config, CalibrationMode mode)
{
    const auto scans = scans_from_table(scans_csv);
    if (scans.empty())
        throw UsageError("estimate: scan file has no rows");
    if (scans.front().counts.size() != static_cast<std::size_t>(config.n_pixels))
        throw UsageError("estimate: scan width " + std::to_string(scans.front().counts.size())
                         + " does not match n_pixels " + std::to_string(config.n_pixels));
    auto table = stats_table(analyze_campaign(scans, config, mode));
    std::ostringstream hash;
    hash << std::hex << config.hash();
    table.metadata.emplace_back("config_hash", hash.str());
    table.metadata.emplace_back("seed", std::to_string(config.seed));
    table.metadata.emplace_back("calibration", mode == CalibrationMode::model ? "model" : "scans");
    table.metadata.emplace_back("n_detections", format_number(config.mean_detections));
    return table;
}

std::string summarize(const CsvTable& table, std::size_t max_rows)
{
    std::vector<std::size_t> width(table.header.size());
    const std::size_t shown = std::min(max_rows, table.rows.size());
    for (std::size_t c = 0; c < table.header.size(); ++c)
    {
        width[c] = table.header[c].size();
        for (std::size_t r = 0; r < shown; ++r)
            width[c] = std::max(width[c], std::min<std::size_t>(table.rows[r][c].size(), 14));
    }
    std::ostringstream out;
    const auto cell = [](const std::string& text) {
        if (text.size() <= 14)
            return text;
        std::ostringstream s;
        s << std::setprecision(8) << parse_number(text);
        return s.str();
    };
    for (std::size_t c = 0; c < table.header.size(); ++c)
        out << std::setw(static_cast<int>(width[c] + 2)) << table.header[c];
    out << '\n';
    for (std::size_t r = 0; r < shown; ++r)
    {
        for (std::size_t c = 0; c < table.header.size(); ++c)
            out << std::setw(static_cast<int>(width[c] + 2)) << cell(table.rows[r][c]);
        out << '\n';
    }
    if (shown < table.rows.size())
        out << "  ... " << table.rows.size() - shown << " more rows\n";
    return out.str();
}

} // namespace sgnres
