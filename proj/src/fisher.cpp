#include "sgnres/fisher.hpp"

#include "sgnres/errors.hpp"
#include "sgnres/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace sgnres {

namespace {

constexpr double density_floor = 1e-280;

double derivative_in_s(const DetectionDensity& density, double x, double ds)
{
    if (ds <= 0.0 && density.analytic_ds())
        return density.ds(x);
    const double s = density.separation();
    const double step = ds > 0.0 ? ds : 0.01 * s;
    const auto& family = density.family();
    return (family.at(s + step)(x) - family.at(s - step)(x)) / (2.0 * step);
}

} // namespace

const char* to_string(FisherMethod method)
{
    switch (method)
    {
        case FisherMethod::quadrature:
            return "quadrature";
        case FisherMethod::pixelated:
            return "pixelated";
        case FisherMethod::asymptote_direct:
            return "asymptote_direct";
        case FisherMethod::asymptote_sgn:
            return "asymptote_sgn";
    }
    return "unknown";
}

bool CrlbResult::bounded() const
{
    return std::isfinite(variance_bound);
}

double fisher_density(const DetectionDensity& density, double x, double ds)
{
    const double p = density(x);
    if (p < density_floor)
        return 0.0;
    const double dp = derivative_in_s(density, x, ds);
    return dp * dp / p;
}

FisherResult fisher_continuous(const DensityFamily& family, double s, double ds)
{
    if (!(s >= 0.0) || !std::isfinite(s))
        throw std::domain_error("fisher_continuous: s must be finite and >= 0");
    // p(x|s) is even in s, so its s-derivative vanishes at coincidence.
    if (s == 0.0)
        return {0.0, 0.0, FisherMethod::quadrature, 0.0};
    const bool analytic = family.profile().analytic_slope();
    if (!analytic)
    {
        if (ds == 0.0)
            ds = 0.01 * s;
        if (!(ds > 0.0 && ds <= 0.1 * s))
            throw std::domain_error("fisher_continuous: ds must lie in (0, s/10]");
    }

    const DetectionDensity density = family.at(s);
    const double sigma = family.psf().sigma();
    const double step = analytic ? 0.0 : ds;
    const auto integrand = [&density, step](double x) { return fisher_density(density, x, step); };

    // The integrand is even in x.
    std::vector<double> pts{0.0, 0.25 * s, 0.5 * s, s, 2.0 * s};
    for (double m : {1.0, 4.0, 16.0, 64.0})
        pts.push_back(m * sigma);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.push_back(std::numeric_limits<double>::infinity());

    const auto half = integrate_pieces(integrand, pts, {.rel_tol = 1e-10, .abs_tol = 0.0});
    FisherResult result;
    result.value = 2.0 * half.value;
    result.s = s;
    result.method = FisherMethod::quadrature;
    result.quadrature_error_estimate = 2.0 * half.error_estimate;
    return result;
}

FisherResult fisher_direct_asymptote(double s, double sigma)
{
    if (!(s >= 0.0))
        throw std::domain_error("fisher_direct_asymptote: s must be >= 0");
    const double u = s / sigma;
    return {u * u / (8.0 * sigma * sigma), s, FisherMethod::asymptote_direct, 0.0};
}

FisherResult fisher_sgn_asymptote(double s, double sigma)
{
    if (!(s >= 0.0))
        throw std::domain_error("fisher_sgn_asymptote: s must be >= 0");
    const double u = s / sigma;
    return {u / (2.0 * std::sqrt(2.0 * std::numbers::pi) * sigma * sigma), s,
            FisherMethod::asymptote_sgn, 0.0};
}

FisherResult fisher_pixelated(const DensityFamily& family, double s, const CameraConfig& camera,
                              double ds)
{
    if (!(s >= 0.0) || !std::isfinite(s))
        throw std::domain_error("fisher_pixelated: s must be finite and >= 0");
    camera.validate(family.psf().sigma());
    if (s == 0.0)
        return {0.0, 0.0, FisherMethod::pixelated, 0.0};
    const PixelModel model = pixel_model(family.at(s), camera);
    std::vector<double> dp = model.probability_ds;
    if (ds > 0.0)
    {
        if (ds > 0.1 * s)
            throw std::domain_error("fisher_pixelated: ds must lie in (0, s/10]");
        const auto up = pixel_probabilities(family.at(s + ds), camera);
        const auto down = pixel_probabilities(family.at(s - ds), camera);
        for (std::size_t i = 0; i < dp.size(); ++i)
            dp[i] = (up[i] - down[i]) / (2.0 * ds);
    }

    double f = 0.0;
    for (std::size_t i = 0; i < dp.size(); ++i)
    {
        const double p = model.probability[i];
        if (p > density_floor)
            f += dp[i] * dp[i] / p;
    }
    return {f, s, FisherMethod::pixelated, 0.0};
}

CrlbResult crlb(const FisherResult& f, std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("crlb: detection count must be positive");
    if (f.value < 0.0 || std::isnan(f.value))
        throw std::invalid_argument("crlb: Fisher information must be >= 0");
    CrlbResult r;
    r.n_detections = n;
    r.variance_bound = f.value > 0.0 ? 1.0 / (static_cast<double>(n) * f.value)
                                     : std::numeric_limits<double>::infinity();
    return r;
}

std::vector<FisherResult> fisher_curve(const DensityFamily& family, std::span<const double> s_values,
                                       unsigned threads)
{
    std::vector<FisherResult> out(s_values.size());
    const auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < s_values.size(); i += stride)
        {
            out[i] = fisher_continuous(family, s_values[i]);
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(s_values.size())));
    if (threads == 1)
    {
        work(0, 1);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try
                {
                    work(t, threads);
                }
                catch (...)
                {
                    errors[t] = std::current_exception();
                }
            });
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace sgnres
