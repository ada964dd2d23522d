#pragma once

#include <functional>
#include <memory>

namespace sgnres {

/// Real, even, unit-energy amplitude point-spread function Psi(x).
///
/// Lengths are in the same units as sigma().  Library code works in units
/// where sigma = 1, but nothing here assumes it.
class AmplitudePsf
{
  public:
    virtual ~AmplitudePsf() = default;

    double sigma() const { return sigma_; }

    virtual double amplitude(double x) const = 0;
    virtual double derivative(double x) const = 0;
    // Psi''(0); the x -> 0 limit of Psi'(x) / x.
    virtual double curvature_at_origin() const = 0;
    // False when derivative() carries finite-difference noise.
    virtual bool analytic_derivatives() const { return true; }

    double intensity(double x) const
    {
        const double a = amplitude(x);
        return a * a;
    }

  protected:
    explicit AmplitudePsf(double sigma);

  private:
    double sigma_;
};

using PsfHandle = std::shared_ptr<const AmplitudePsf>;

/// Psi(x) = (2 pi sigma^2)^(-1/4) exp(-x^2 / (4 sigma^2)); the intensity is a
/// normal density with standard deviation sigma.
class GaussianPsf final : public AmplitudePsf
{
  public:
    explicit GaussianPsf(double sigma);

    double amplitude(double x) const override;
    double derivative(double x) const override;
    double curvature_at_origin() const override;

  private:
    double norm_;
};

/// User-supplied amplitude.  Derivatives use fourth-order central differences
/// with h = 1e-4 sigma.  The caller is responsible for evenness and unit
/// energy; check_normalization() verifies the latter.
class FunctionPsf final : public AmplitudePsf
{
  public:
    FunctionPsf(double sigma, std::function<double(double)> amplitude);

    double amplitude(double x) const override;
    double derivative(double x) const override;
    double curvature_at_origin() const override;
    bool analytic_derivatives() const override { return false; }

  private:
    std::function<double(double)> fn_;
    double h_;
};

// Throws std::domain_error for sigma <= 0.
PsfHandle gaussian_psf(double sigma);

// Integral of Psi(x)^2 over the real line.
double psf_energy(const AmplitudePsf& psf);

// alpha = [integral Psi'(xi) / xi dxi]^2 / pi^2, the curvature of the
// signum-filtered detection density near the origin.
double parabolic_alpha(const AmplitudePsf& psf);

// Integral of Psi'(xi) / xi over the real line (the bracketed quantity above).
double derivative_ratio_integral(const AmplitudePsf& psf);

//---------------------------------------------------------------------------//
// Detection densities
//---------------------------------------------------------------------------//

/// Detected intensity J(x) produced by a single point source at the origin.
///
/// The two-source detection density is the equal mixture
/// p(x|s) = [J(x - s/2) + J(x + s/2)] / 2.
class ComponentProfile
{
  public:
    virtual ~ComponentProfile() = default;

    virtual double value(double x) const = 0;
    virtual double slope(double x) const = 0;
    // False when slope() is a numerical approximation.
    virtual bool analytic_slope() const = 0;
    // Integral of J over [a, b]; a and b may be infinite.
    virtual double mass(double a, double b) const;
    // Length scale used to place quadrature breakpoints.
    virtual double scale() const { return 1.0; }
};

using ProfileHandle = std::shared_ptr<const ComponentProfile>;

enum class DensityKind
{
    direct,
    signum_filtered,
};

const char* to_string(DensityKind kind);

class DetectionDensity;

/// p(x|s) for every separation s >= 0, for a fixed PSF and detection scheme.
class DensityFamily
{
  public:
    DensityFamily(DensityKind kind, PsfHandle psf, ProfileHandle profile);

    DensityKind kind() const { return kind_; }
    const AmplitudePsf& psf() const { return *psf_; }
    const PsfHandle& psf_handle() const { return psf_; }
    const ComponentProfile& profile() const { return *profile_; }

    // Throws std::domain_error for s < 0.
    DetectionDensity at(double s) const;

  private:
    DensityKind kind_;
    PsfHandle psf_;
    ProfileHandle profile_;
};

class DetectionDensity
{
  public:
    DetectionDensity(DensityFamily family, double separation);

    DensityKind kind() const { return family_.kind(); }
    const DensityFamily& family() const { return family_; }
    const AmplitudePsf& psf() const { return family_.psf(); }
    double separation() const { return s_; }

    double operator()(double x) const;
    // Partial derivative of p(x|s) with respect to s.
    double ds(double x) const;
    bool analytic_ds() const { return family_.profile().analytic_slope(); }

    // Probability of a detection in [a, b]; limits may be infinite.
    double mass(double a, double b) const;
    // d/ds of mass(a, b), exact in terms of profile values.
    double mass_ds(double a, double b) const;

  private:
    DensityFamily family_;
    double s_;
};

// Detected intensity without filtering: J = |Psi|^2.
ProfileHandle direct_profile(const PsfHandle& psf);

DensityFamily direct_family(const PsfHandle& psf);

// Throws std::domain_error for s < 0.
DetectionDensity direct_density(const PsfHandle& psf, double s);

} // namespace sgnres
