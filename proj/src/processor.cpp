#include "sgnres/processor.hpp"

#include "sgnres/errors.hpp"
#include "sgnres/specfun.hpp"

#include <fftw3.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sgnres {

namespace {

constexpr double pi = std::numbers::pi;
using cplx = std::complex<double>;

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

class FftBuffer
{
  public:
    explicit FftBuffer(std::size_t n)
        : n_(n), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
    {
        if (!data_)
            throw std::bad_alloc();
        std::memset(data_, 0, sizeof(fftw_complex) * n);
        std::lock_guard lock(fftw_planner_mutex());
        forward_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftBuffer()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(data_);
    }
    FftBuffer(const FftBuffer&) = delete;
    FftBuffer& operator=(const FftBuffer&) = delete;

    std::size_t size() const { return n_; }
    cplx get(std::size_t i) const { return {data_[i][0], data_[i][1]}; }
    void set(std::size_t i, cplx v)
    {
        data_[i][0] = v.real();
        data_[i][1] = v.imag();
    }
    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }

  private:
    std::size_t n_;
    fftw_complex* data_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

// Discrete kernel of -(i/pi) p.v. 1/x for band-limited samples: nonzero on odd
// lags only, -(i) * 2 / (pi k).
cplx kernel_at_lag(std::ptrdiff_t k)
{
    if (k % 2 == 0)
        return {0.0, 0.0};
    return {0.0, -2.0 / (pi * static_cast<double>(k))};
}

// Six-point Lagrange weights (and their derivatives) for nodes at offsets
// -2..3 and fractional position t in [0, 1).
struct Stencil
{
    std::array<double, 6> w;
    std::array<double, 6> dw;
};

Stencil lagrange6(double t)
{
    Stencil st{};
    for (int j = 0; j < 6; ++j)
    {
        const double xj = j - 2;
        double denom = 1.0;
        double prod = 1.0;
        double dprod = 0.0;
        for (int k = 0; k < 6; ++k)
        {
            if (k == j)
                continue;
            const double xk = k - 2;
            denom *= xj - xk;
            dprod = dprod * (t - xk) + prod;
            prod *= t - xk;
        }
        st.w[j] = prod / denom;
        st.dw[j] = dprod / denom;
    }
    return st;
}

constexpr int moment_order = 8;

std::vector<cplx> field_moments(const SampledField& field)
{
    std::vector<cplx> m(moment_order + 1, cplx{});
    for (std::size_t n = 0; n < field.size(); ++n)
    {
        const double x = field.x(n);
        double xp = field.grid_step;
        for (int k = 0; k <= moment_order; ++k)
        {
            m[k] += field.values[n] * xp;
            xp *= x;
        }
    }
    return m;
}

// Integral over [edge, inf) of |sum_k c_k u^-(k+1)|^2 du / pi^2.
double tail_energy(const std::vector<cplx>& c, double edge)
{
    double total = 0.0;
    for (int j = 0; j <= moment_order; ++j)
        for (int k = 0; k <= moment_order; ++k)
        {
            const int p = j + k + 1;
            total += std::real(c[j] * std::conj(c[k])) / (p * std::pow(edge, p));
        }
    return total / (pi * pi);
}

class DawsonProfile final : public ComponentProfile
{
  public:
    explicit DawsonProfile(double sigma)
        : sigma_(sigma), coeff_(2.0 * std::sqrt(2.0) / (std::pow(pi, 1.5) * sigma))
    {
    }

    double value(double x) const override
    {
        const double d = dawson(x / (2.0 * sigma_));
        return coeff_ * d * d;
    }
    double slope(double x) const override
    {
        const double z = x / (2.0 * sigma_);
        const double d = dawson(z);
        return coeff_ * d * (1.0 - 2.0 * z * d) / sigma_;
    }
    bool analytic_slope() const override { return true; }
    double scale() const override { return sigma_; }

  private:
    double sigma_;
    double coeff_;
};

} // namespace

//---------------------------------------------------------------------------//

double SampledField::energy() const
{
    double e = 0.0;
    for (const auto& v : values)
        e += std::norm(v);
    return e * grid_step;
}

void SampledField::validate() const
{
    const std::size_t m = values.size();
    if (m < 1024 || !std::has_single_bit(m))
        throw ConfigurationError("SampledField: length must be a power of two >= 1024");
    if (!(grid_step > 0.0))
        throw ConfigurationError("SampledField: grid_step must be positive");
    const double expected = -static_cast<double>(m / 2) * grid_step;
    if (std::abs(grid_min - expected) > 1e-9 * grid_step)
        throw ConfigurationError("SampledField: grid must satisfy grid_min = -(M/2) * grid_step");
}

int signum_mask(double f)
{
    return (f > 0.0) - (f < 0.0);
}

SampledField sample_field(const AmplitudePsf& psf, double shift, std::size_t points, double step)
{
    if (!(step > 0.0))
        step = psf.sigma() * default_grid_step_per_sigma;
    SampledField field;
    field.grid_step = step;
    field.grid_min = -static_cast<double>(points / 2) * step;
    field.values.resize(points);
    for (std::size_t n = 0; n < points; ++n)
        field.values[n] = psf.amplitude(field.x(n) - shift);
    field.validate();
    return field;
}

SampledField apply_signum(const SampledField& field, double sigma, SignumRealization realization)
{
    field.validate();
    if (!(sigma > 0.0))
        throw std::domain_error("apply_signum: sigma must be positive");
    if (field.grid_step > sigma / 8.0)
    {
        std::ostringstream msg;
        msg << "apply_signum: grid_step " << field.grid_step << " exceeds sigma/8 = " << sigma / 8.0;
        throw ConfigurationError(msg.str());
    }

    const std::size_t m = field.size();
    const std::size_t padded = 2 * m;
    FftBuffer signal(padded);
    for (std::size_t n = 0; n < m; ++n)
        signal.set(n, field.values[n]);
    signal.forward();

    if (realization == SignumRealization::linear)
    {
        // Lags -(M-1)..(M-1) fit in 2M slots without overlap, so the
        // circular product below is a linear convolution on the output grid.
        FftBuffer kernel(padded);
        for (std::size_t k = 1; k < m; ++k)
        {
            kernel.set(k, kernel_at_lag(static_cast<std::ptrdiff_t>(k)));
            kernel.set(padded - k, kernel_at_lag(-static_cast<std::ptrdiff_t>(k)));
        }
        kernel.forward();
        for (std::size_t k = 0; k < padded; ++k)
            signal.set(k, signal.get(k) * kernel.get(k));
    }
    else
    {
        // Bin k holds frequency k/(2M h) for k < M and (k - 2M)/(2M h) above;
        // the Nyquist bin has no sign and is zeroed with DC.  FFTW's forward
        // kernel is exp(-2 pi i f x), hence the minus sign.
        for (std::size_t k = 0; k < padded; ++k)
        {
            const double f = k < m ? static_cast<double>(k) : static_cast<double>(k) - padded;
            const int mask = k == m ? 0 : signum_mask(f);
            signal.set(k, signal.get(k) * static_cast<double>(-mask));
        }
    }

    signal.backward();
    SampledField out;
    out.grid_min = field.grid_min;
    out.grid_step = field.grid_step;
    out.values.resize(m);
    const double inv = 1.0 / static_cast<double>(padded);
    for (std::size_t n = 0; n < m; ++n)
        out.values[n] = signal.get(n) * inv;
    return out;
}

double out_of_grid_energy(const SampledField& field)
{
    field.validate();
    const auto m = field_moments(field);
    const double h = field.grid_step;
    const double right = field.x(field.size() - 1) + 0.5 * h;
    const double left = -(field.grid_min - 0.5 * h);
    // Mirror x -> -u: sum m_k x^-(k+1) = sum (-1)^(k+1) m_k u^-(k+1).
    std::vector<cplx> mirrored(m.size());
    for (std::size_t k = 0; k < m.size(); ++k)
        mirrored[k] = (k % 2 == 0) ? -m[k] : m[k];
    return tail_energy(m, right) + tail_energy(mirrored, left);
}

double filtered_intensity_gaussian(double x, double s, double sigma)
{
    if (!(sigma > 0.0))
        throw std::domain_error("filtered_intensity_gaussian: sigma must be positive");
    const double coeff = 2.0 * std::sqrt(2.0) / (std::pow(pi, 1.5) * sigma);
    const double dm = dawson((x - 0.5 * s) / (2.0 * sigma));
    const double dp = dawson((x + 0.5 * s) / (2.0 * sigma));
    return 0.5 * coeff * (dm * dm + dp * dp);
}

//---------------------------------------------------------------------------//

GridSignumProfile::GridSignumProfile(const AmplitudePsf& psf, std::size_t points, double step)
    : sigma_(psf.sigma())
{
    const SampledField input = sample_field(psf, 0.0, points, step);
    const SampledField output = apply_signum(input, sigma_);
    grid_min_ = output.grid_min;
    step_ = output.grid_step;
    intensity_.resize(output.size());
    for (std::size_t n = 0; n < output.size(); ++n)
        intensity_[n] = std::norm(output.values[n]);
    moments_ = field_moments(input);

    const double raw = output.energy() + out_of_grid_energy(input);
    correction_ = std::abs(1.0 - raw);
    if (correction_ > 1e-4)
    {
        std::ostringstream msg;
        msg << "GridSignumProfile: mass correction " << correction_
            << " exceeds 1e-4; refine the grid or check PSF normalisation";
        throw NumericalError(msg.str());
    }
    scale_ = 1.0 / raw;
    for (auto& v : intensity_)
        v *= scale_;
}

double GridSignumProfile::tail(double x) const
{
    cplx sum{};
    double inv = 1.0 / x;
    double p = inv;
    for (const auto& mk : moments_)
    {
        sum += mk * p;
        p *= inv;
    }
    return scale_ * std::norm(sum) / (pi * pi);
}

double GridSignumProfile::tail_slope(double x) const
{
    cplx sum{};
    cplx dsum{};
    const double inv = 1.0 / x;
    double p = inv;
    for (std::size_t k = 0; k < moments_.size(); ++k)
    {
        sum += moments_[k] * p;
        dsum -= static_cast<double>(k + 1) * moments_[k] * p * inv;
        p *= inv;
    }
    return scale_ * 2.0 * std::real(sum * std::conj(dsum)) / (pi * pi);
}

double GridSignumProfile::value(double x) const
{
    const double u = (x - grid_min_) / step_;
    const auto last = static_cast<double>(intensity_.size()) - 4.0;
    if (!(u >= 2.0 && u < last))
        return tail(x);
    const auto i = static_cast<std::size_t>(u);
    const auto st = lagrange6(u - static_cast<double>(i));
    double v = 0.0;
    for (int j = 0; j < 6; ++j)
        v += st.w[j] * intensity_[i + j - 2];
    return v;
}

double GridSignumProfile::slope(double x) const
{
    const double u = (x - grid_min_) / step_;
    const auto last = static_cast<double>(intensity_.size()) - 4.0;
    if (!(u >= 2.0 && u < last))
        return tail_slope(x);
    const auto i = static_cast<std::size_t>(u);
    const auto st = lagrange6(u - static_cast<double>(i));
    double v = 0.0;
    for (int j = 0; j < 6; ++j)
        v += st.dw[j] * intensity_[i + j - 2];
    return v / step_;
}

//---------------------------------------------------------------------------//

ProfileHandle signum_profile(const PsfHandle& psf, SignumRoute route)
{
    if (!psf)
        throw std::invalid_argument("signum_profile: null PSF");
    if (route == SignumRoute::automatic && dynamic_cast<const GaussianPsf*>(psf.get()))
        return std::make_shared<DawsonProfile>(psf->sigma());
    return std::make_shared<GridSignumProfile>(*psf, default_grid_points,
                                               psf->sigma() * default_grid_step_per_sigma);
}

DensityFamily signum_family(const PsfHandle& psf, SignumRoute route)
{
    return DensityFamily(DensityKind::signum_filtered, psf, signum_profile(psf, route));
}

DetectionDensity sgn_density(const PsfHandle& psf, double s, SignumRoute route)
{
    if (!(s >= 0.0))
        throw std::domain_error("sgn_density: separation must be >= 0");
    return signum_family(psf, route).at(s);
}

} // namespace sgnres
