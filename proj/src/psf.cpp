#include "sgnres/psf.hpp"

#include "sgnres/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sgnres {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> breakpoints_between(double a, double b, double scale)
{
    std::vector<double> pts{a};
    for (double m : {-64.0, -8.0, -1.0, 0.0, 1.0, 8.0, 64.0})
    {
        const double x = m * scale;
        if (x > a && x < b)
            pts.push_back(x);
    }
    pts.push_back(b);
    return pts;
}

} // namespace

AmplitudePsf::AmplitudePsf(double sigma) : sigma_(sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::domain_error("AmplitudePsf: sigma must be positive and finite");
}

//---------------------------------------------------------------------------//

GaussianPsf::GaussianPsf(double sigma)
    : AmplitudePsf(sigma), norm_(std::pow(2.0 * pi * sigma * sigma, -0.25))
{
}

double GaussianPsf::amplitude(double x) const
{
    const double u = x / sigma();
    return norm_ * std::exp(-0.25 * u * u);
}

double GaussianPsf::derivative(double x) const
{
    return -0.5 * x / (sigma() * sigma()) * amplitude(x);
}

double GaussianPsf::curvature_at_origin() const
{
    return -0.5 * norm_ / (sigma() * sigma());
}

//---------------------------------------------------------------------------//

FunctionPsf::FunctionPsf(double sigma, std::function<double(double)> amplitude)
    : AmplitudePsf(sigma), fn_(std::move(amplitude)), h_(1e-4 * sigma)
{
    if (!fn_)
        throw std::invalid_argument("FunctionPsf: empty amplitude function");
}

double FunctionPsf::amplitude(double x) const
{
    return fn_(x);
}

double FunctionPsf::derivative(double x) const
{
    const double h = h_;
    return (fn_(x - 2 * h) - 8 * fn_(x - h) + 8 * fn_(x + h) - fn_(x + 2 * h)) / (12 * h);
}

double FunctionPsf::curvature_at_origin() const
{
    const double h = h_;
    return (-fn_(2 * h) + 16 * fn_(h) - 30 * fn_(0.0) + 16 * fn_(-h) - fn_(-2 * h))
           / (12 * h * h);
}

//---------------------------------------------------------------------------//

PsfHandle gaussian_psf(double sigma)
{
    if (!(sigma > 0.0))
        throw std::domain_error("gaussian_psf: sigma must be positive");
    return std::make_shared<GaussianPsf>(sigma);
}

double psf_energy(const AmplitudePsf& psf)
{
    const auto f = [&psf](double x) { return psf.intensity(x); };
    const auto inf = std::numeric_limits<double>::infinity();
    const auto pts = breakpoints_between(-inf, inf, psf.sigma());
    return integrate_pieces(f, pts, {.rel_tol = 1e-13}).value;
}

double derivative_ratio_integral(const AmplitudePsf& psf)
{
    // Psi'/xi is even for an even PSF; integrate the half line and double.
    // The xi -> 0 limit is substituted explicitly to avoid 0/0.
    const double sigma = psf.sigma();
    const double near_zero = 1e-3 * sigma;
    const auto f = [&psf, near_zero](double xi) {
        if (std::abs(xi) < near_zero)
        {
            // Psi'(xi)/xi = Psi''(0) + O(xi^2); the quadratic term is
            // recovered from one derivative sample at the threshold.
            const double c0 = psf.curvature_at_origin();
            const double at_edge = psf.derivative(near_zero) / near_zero;
            const double t = xi / near_zero;
            return c0 + (at_edge - c0) * t * t;
        }
        return psf.derivative(xi) / xi;
    };
    const auto inf = std::numeric_limits<double>::infinity();
    const std::array<double, 6> pts{0.0, near_zero, sigma, 8.0 * sigma, 64.0 * sigma, inf};
    // Difference-quotient noise of order eps / (h * xi) caps what a sampled
    // PSF can reach near the origin.
    const double tol = psf.analytic_derivatives() ? 1e-13 : 1e-9;
    const auto result = integrate_pieces(f, pts, {.rel_tol = tol});
    return 2.0 * result.value;
}

double parabolic_alpha(const AmplitudePsf& psf)
{
    const double integral = derivative_ratio_integral(psf);
    return integral * integral / (pi * pi);
}

//---------------------------------------------------------------------------//

double ComponentProfile::mass(double a, double b) const
{
    if (!(a < b))
        return 0.0;
    const auto f = [this](double x) { return value(x); };
    const auto pts = breakpoints_between(a, b, scale());
    return integrate_pieces(f, pts, {.rel_tol = 1e-12, .abs_tol = 1e-16}).value;
}

const char* to_string(DensityKind kind)
{
    switch (kind)
    {
        case DensityKind::direct:
            return "direct";
        case DensityKind::signum_filtered:
            return "sgn";
    }
    return "unknown";
}

DensityFamily::DensityFamily(DensityKind kind, PsfHandle psf, ProfileHandle profile)
    : kind_(kind), psf_(std::move(psf)), profile_(std::move(profile))
{
    if (!psf_ || !profile_)
        throw std::invalid_argument("DensityFamily: null PSF or profile");
}

DetectionDensity DensityFamily::at(double s) const
{
    return DetectionDensity(*this, s);
}

DetectionDensity::DetectionDensity(DensityFamily family, double separation)
    : family_(std::move(family)), s_(separation)
{
    if (!(separation >= 0.0) || !std::isfinite(separation))
        throw std::domain_error("DetectionDensity: separation must be finite and >= 0");
}

double DetectionDensity::operator()(double x) const
{
    const auto& j = family_.profile();
    const double h = 0.5 * s_;
    return 0.5 * (j.value(x - h) + j.value(x + h));
}

double DetectionDensity::ds(double x) const
{
    const auto& j = family_.profile();
    const double h = 0.5 * s_;
    return 0.25 * (j.slope(x + h) - j.slope(x - h));
}

double DetectionDensity::mass(double a, double b) const
{
    const auto& j = family_.profile();
    const double h = 0.5 * s_;
    if (h == 0.0)
        return j.mass(a, b);
    return 0.5 * (j.mass(a - h, b - h) + j.mass(a + h, b + h));
}

double DetectionDensity::mass_ds(double a, double b) const
{
    const auto& j = family_.profile();
    const double h = 0.5 * s_;
    const auto at = [&j](double x) { return std::isinf(x) ? 0.0 : j.value(x); };
    return 0.25 * (at(b + h) - at(a + h) - at(b - h) + at(a - h));
}

//---------------------------------------------------------------------------//

namespace {

/// |Psi|^2 for a Gaussian: a normal density with closed-form masses.
class GaussianIntensityProfile final : public ComponentProfile
{
  public:
    explicit GaussianIntensityProfile(double sigma) : sigma_(sigma) {}

    double value(double x) const override
    {
        const double u = x / sigma_;
        return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * pi) * sigma_);
    }
    double slope(double x) const override { return -x / (sigma_ * sigma_) * value(x); }
    bool analytic_slope() const override { return true; }
    double scale() const override { return sigma_; }

    double mass(double a, double b) const override
    {
        if (!(a < b))
            return 0.0;
        const double k = 1.0 / (std::sqrt(2.0) * sigma_);
        // Upper tail Q(x) = erfc(x k)/2, accurate far out on either side.
        const auto upper = [k](double x) { return 0.5 * std::erfc(x * k); };
        if (a >= 0.0)
            return upper(a) - upper(b);
        if (b <= 0.0)
            return upper(-b) - upper(-a);
        return 1.0 - upper(-a) - upper(b);
    }

  private:
    double sigma_;
};

class IntensityProfile final : public ComponentProfile
{
  public:
    explicit IntensityProfile(PsfHandle psf) : psf_(std::move(psf)) {}

    double value(double x) const override { return psf_->intensity(x); }
    double slope(double x) const override
    {
        return 2.0 * psf_->amplitude(x) * psf_->derivative(x);
    }
    bool analytic_slope() const override { return false; }
    double scale() const override { return psf_->sigma(); }

  private:
    PsfHandle psf_;
};

} // namespace

ProfileHandle direct_profile(const PsfHandle& psf)
{
    if (!psf)
        throw std::invalid_argument("direct_profile: null PSF");
    if (dynamic_cast<const GaussianPsf*>(psf.get()))
        return std::make_shared<GaussianIntensityProfile>(psf->sigma());
    return std::make_shared<IntensityProfile>(psf);
}

DensityFamily direct_family(const PsfHandle& psf)
{
    return DensityFamily(DensityKind::direct, psf, direct_profile(psf));
}

DetectionDensity direct_density(const PsfHandle& psf, double s)
{
    if (!(s >= 0.0))
        throw std::domain_error("direct_density: separation must be >= 0");
    return direct_family(psf).at(s);
}

} // namespace sgnres
