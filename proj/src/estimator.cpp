#include "sgnres/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace sgnres {

bool CalibrationCurve::valid() const
{
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || !(b > 0.0))
        return false;
    double s_max = 0.0;
    for (double s : s_grid)
        s_max = std::max(s_max, std::abs(s));
    if (s_max == 0.0)
        return true;
    // The fitted rise over the grid must stand out of rounding noise.
    const double rise = b * s_max * s_max;
    return rise > 1e-9 * (a + rise);
}

CalibrationCurve fit_calibration(std::span<const CalibrationPoint> points)
{
    std::vector<double> distinct;
    for (const auto& p : points)
    {
        if (!std::isfinite(p.s) || !std::isfinite(p.mean_count))
            throw FitError("fit_calibration: non-finite calibration point");
        if (p.mean_count < 0.0)
            throw FitError("fit_calibration: negative mean count");
        distinct.push_back(p.s * p.s);
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
        throw FitError("fit_calibration: need at least three distinct separations");

    // Centred normal equations for y = a + b u with u = s^2.
    const auto n = static_cast<double>(points.size());
    double mean_u = 0.0;
    double mean_y = 0.0;
    for (const auto& p : points)
    {
        mean_u += p.s * p.s;
        mean_y += p.mean_count;
    }
    mean_u /= n;
    mean_y /= n;
    double suu = 0.0;
    double suy = 0.0;
    for (const auto& p : points)
    {
        const double du = p.s * p.s - mean_u;
        suu += du * du;
        suy += du * (p.mean_count - mean_y);
    }
    if (!(suu > 0.0))
        throw FitError("fit_calibration: rank-deficient design");

    CalibrationCurve cal;
    cal.b = suy / suu;
    cal.a = mean_y - cal.b * mean_u;
    double ss = 0.0;
    for (const auto& p : points)
    {
        const double r = p.mean_count - cal.response(p.s);
        ss += r * r;
        cal.s_grid.push_back(p.s);
    }
    cal.residual_rms = std::sqrt(ss / n);
    return cal;
}

CalibrationCurve calibrate_from_model(const DensityFamily& family, const CameraConfig& camera,
                                      std::span<const double> s_grid)
{
    const int centre = camera.central_index();
    const int half = camera.central_columns / 2;
    std::vector<CalibrationPoint> points;
    for (double s : s_grid)
    {
        const auto p = pixel_probabilities(family.at(s), camera);
        double mass = 0.0;
        for (int i = centre - half; i <= centre + half; ++i)
            mass += p.at(static_cast<std::size_t>(i));
        points.push_back({s, camera.mean_detections * mass});
    }
    return fit_calibration(points);
}

CalibrationCurve calibrate_from_scans(std::span<const ScanRecord> scans, const CameraConfig& camera)
{
    std::map<double, std::pair<double, int>> sums;
    for (const auto& scan : scans)
    {
        auto& [sum, count] = sums[scan.true_s];
        sum += central_statistic(scan, camera);
        ++count;
    }
    std::vector<CalibrationPoint> points;
    for (const auto& [s, acc] : sums)
        points.push_back({s, acc.first / acc.second});
    return fit_calibration(points);
}

double estimate_separation(double n, const CalibrationCurve& cal)
{
    if (!cal.valid())
        throw FitError("estimate_separation: calibration curve is degenerate");
    return std::sqrt(std::max(0.0, (n - cal.a) / cal.b));
}

double EstimatorStats::standard_error() const
{
    return n_samples > 0 ? std::sqrt(variance / n_samples) : 0.0;
}

EstimatorStats evaluate_estimator(std::span<const ScanRecord> scans, const CalibrationCurve& cal,
                                  const CameraConfig& camera)
{
    if (scans.size() < 2)
        throw std::invalid_argument("evaluate_estimator: need at least two scans");
    const double s_true = scans.front().true_s;
    std::vector<double> estimates;
    estimates.reserve(scans.size());
    for (const auto& scan : scans)
    {
        if (scan.true_s != s_true)
            throw std::invalid_argument("evaluate_estimator: scans have different true separations");
        estimates.push_back(estimate_separation(central_statistic(scan, camera), cal));
    }

    EstimatorStats stats;
    stats.s_true = s_true;
    stats.n_samples = static_cast<int>(estimates.size());
    double mean = 0.0;
    for (double e : estimates)
        mean += e;
    mean /= static_cast<double>(estimates.size());
    double ss = 0.0;
    for (double e : estimates)
        ss += (e - mean) * (e - mean);
    stats.mean_estimate = mean;
    stats.variance = ss / static_cast<double>(estimates.size() - 1);
    stats.bias = mean - s_true;
    return stats;
}

} // namespace sgnres
