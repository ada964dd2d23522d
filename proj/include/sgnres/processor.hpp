#pragma once

#include "sgnres/psf.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace sgnres {

/// Complex field samples on the symmetric grid x_n = grid_min + n * grid_step,
/// n = 0 .. M-1, with grid_min = -(M/2) * grid_step.
struct SampledField
{
    double grid_min = 0.0;
    double grid_step = 0.0;
    std::vector<std::complex<double>> values;

    std::size_t size() const { return values.size(); }
    double x(std::size_t n) const { return grid_min + static_cast<double>(n) * grid_step; }
    // Sum of |value|^2 * grid_step.
    double energy() const;

    // Throws ConfigurationError unless M >= 1024 is a power of two and the
    // grid is symmetric about the origin.
    void validate() const;
};

inline constexpr std::size_t default_grid_points = 4096;
inline constexpr double default_grid_step_per_sigma = 1.0 / 64.0;

// sgn(f), with sgn(0) = 0.
int signum_mask(double f);

// Samples Psi(x - shift) on the symmetric grid.  A non-positive step selects
// sigma / 64.
SampledField sample_field(const AmplitudePsf& psf, double shift,
                          std::size_t points = default_grid_points, double step = 0.0);

enum class SignumRealization
{
    // Linear convolution with the sampled band-limited kernel through a 2x
    // zero-padded transform; no wraparound.
    linear,
    // Plain DFT-bin multiplication on the 2x padded array; the periodic
    // kernel wraps the 1/x tails around.
    circular,
};

/// Output of the 4f processor with a signum Fourier-plane mask,
///   Psi_sgn(x) = -(i/pi) p.v. integral Psi(x') / (x - x') dx',
/// which multiplies the spectrum by sgn(f) for the Fourier kernel
/// exp(+2 pi i f x).  The output shares the input grid.
///
/// Throws ConfigurationError when grid_step > sigma / 8.
SampledField apply_signum(const SampledField& field, double sigma,
                          SignumRealization realization = SignumRealization::linear);

// Energy of the filtered field that falls outside the input grid, from the
// multipole expansion of the 1/x kernel.  Added to apply_signum(field).energy()
// it reproduces the input energy (less the DC contribution, which is zero in
// the continuum).
double out_of_grid_energy(const SampledField& field);

// Mixture [|Psi_sgn_-|^2 + |Psi_sgn_+|^2] / 2 for the Gaussian PSF, with
// |Psi_sgn_+-|^2 = 2 sqrt(2) D((x +- s/2) / (2 sigma))^2 / (pi^(3/2) sigma).
double filtered_intensity_gaussian(double x, double s, double sigma);

enum class SignumRoute
{
    automatic,  // analytic Dawson form for Gaussian PSFs, numeric otherwise
    numeric,    // always filter a sampled field
};

// Single-source detected intensity behind the signum mask.
ProfileHandle signum_profile(const PsfHandle& psf, SignumRoute route = SignumRoute::automatic);

DensityFamily signum_family(const PsfHandle& psf, SignumRoute route = SignumRoute::automatic);

// Throws std::domain_error for s < 0; NumericalError when the numeric route
// needs a mass correction above 1e-4.
DetectionDensity sgn_density(const PsfHandle& psf, double s,
                             SignumRoute route = SignumRoute::automatic);

/// Numerically filtered single-source profile, exposed for diagnostics.
class GridSignumProfile final : public ComponentProfile
{
  public:
    GridSignumProfile(const AmplitudePsf& psf, std::size_t points, double step);

    double value(double x) const override;
    double slope(double x) const override;
    bool analytic_slope() const override { return false; }
    double scale() const override { return sigma_; }

    // |1 - raw mass| before renormalisation.
    double mass_correction() const { return correction_; }
    double grid_min() const { return grid_min_; }
    double grid_max() const { return grid_min_ + step_ * static_cast<double>(intensity_.size() - 1); }

  private:
    double tail(double x) const;
    double tail_slope(double x) const;

    double sigma_;
    double grid_min_;
    double step_;
    std::vector<double> intensity_;
    std::vector<std::complex<double>> moments_;
    double scale_ = 1.0;
    double correction_ = 0.0;
};

} // namespace sgnres
