#pragma once

#include "sgnres/camera.hpp"
#include "sgnres/psf.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace sgnres {

class FitError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct CalibrationPoint
{
    double s = 0.0;
    double mean_count = 0.0;
};

/// Central-column response model n(s) = a + b s^2.
struct CalibrationCurve
{
    double a = 0.0;
    double b = 0.0;
    double residual_rms = 0.0;
    std::vector<double> s_grid;

    // a >= 0 and a curvature that is resolvable against the offset.
    bool valid() const;
    double response(double s) const { return a + b * s * s; }
};

// Least squares fit of mean_count = a + b s^2.  Throws FitError with fewer
// than three distinct separations or negative counts.  A degenerate
// (non-positive or unresolvable) curvature is reported through valid().
CalibrationCurve fit_calibration(std::span<const CalibrationPoint> points);

// Noise-free calibration from the expected central statistic N P_c(s).
CalibrationCurve calibrate_from_model(const DensityFamily& family, const CameraConfig& camera,
                                      std::span<const double> s_grid);

// Calibration from the per-separation mean central statistic of scans.
CalibrationCurve calibrate_from_scans(std::span<const ScanRecord> scans, const CameraConfig& camera);

// s_hat = sqrt(max(0, (n - a) / b)).  Throws FitError for an invalid curve.
double estimate_separation(double n, const CalibrationCurve& cal);

struct EstimatorStats
{
    double s_true = 0.0;
    double mean_estimate = 0.0;
    double variance = 0.0;
    double bias = 0.0;
    int n_samples = 0;

    double standard_error() const;
};

// Sample mean, unbiased (n-1) variance and bias of s_hat over scans sharing
// one true separation.  Throws std::invalid_argument for mixed true_s or
// fewer than two scans.
EstimatorStats evaluate_estimator(std::span<const ScanRecord> scans, const CalibrationCurve& cal,
                                  const CameraConfig& camera);

} // namespace sgnres
