#pragma once

#include "sgnres/camera.hpp"
#include "sgnres/psf.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sgnres {

enum class FisherMethod
{
    quadrature,
    pixelated,
    asymptote_direct,
    asymptote_sgn,
};

const char* to_string(FisherMethod method);

/// Fisher information about the separation per single detection.
struct FisherResult
{
    double value = 0.0;
    double s = 0.0;
    FisherMethod method = FisherMethod::quadrature;
    double quadrature_error_estimate = 0.0;
};

struct CrlbResult
{
    // Infinite when the information vanishes.
    double variance_bound = 0.0;
    std::uint64_t n_detections = 1;

    bool bounded() const;
};

// Integrand of the Fisher information, [d_s p(x|s)]^2 / p(x|s).  Points where
// p < 1e-280 contribute zero.  ds > 0 selects a central difference in s.
double fisher_density(const DetectionDensity& density, double x, double ds = 0.0);

/// F(s) = integral [d_s p]^2 / p dx by adaptive quadrature.
///
/// The analytic s-derivative is used when the family provides one; otherwise
/// a central difference with step ds (default s / 100, must lie in
/// (0, s/10]).  Extra breakpoints are placed at s/4, s/2, s and 2s, where the
/// integrand concentrates for small separations.  Returns 0 at s = 0.
/// Throws std::domain_error for s < 0 and NumericalError when the quadrature
/// does not converge.
FisherResult fisher_continuous(const DensityFamily& family, double s, double ds = 0.0);

// (s/sigma)^2 / (8 sigma^2).
FisherResult fisher_direct_asymptote(double s, double sigma = 1.0);
// (s/sigma) / (2 sqrt(2 pi) sigma^2), i.e. (pi/2) alpha s for the Gaussian.
FisherResult fisher_sgn_asymptote(double s, double sigma = 1.0);

// Information carried by the column counts, sum_i (d_s P_i)^2 / P_i.  With
// ds == 0 the column derivatives are exact differences of profile values;
// ds > 0 uses central differences of the column probabilities instead.
FisherResult fisher_pixelated(const DensityFamily& family, double s, const CameraConfig& camera,
                              double ds = 0.0);

// Throws std::invalid_argument for n == 0 or negative information.
CrlbResult crlb(const FisherResult& f, std::uint64_t n);

// fisher_continuous over a grid of separations; s == 0 yields 0.  Results are
// independent of `threads` and of evaluation order.
std::vector<FisherResult> fisher_curve(const DensityFamily& family, std::span<const double> s_values,
                                       unsigned threads = 1);

} // namespace sgnres
