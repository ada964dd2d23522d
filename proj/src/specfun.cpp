#include "sgnres/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgnres {

void DawsonEvalConfig::validate() const
{
    if (!(series_cutoff > 0.0))
        throw std::invalid_argument("DawsonEvalConfig: series_cutoff must be positive");
    if (!(series_tol > 0.0 && series_tol < 1e-10))
        throw std::invalid_argument("DawsonEvalConfig: series_tol must lie in (0, 1e-10)");
}

namespace {

// All terms are positive, so there is no cancellation; the sum behaves like
// exp(z^2) and is rescaled at the end.
double dawson_series(double z, double tol)
{
    const double z2 = z * z;
    double power = z;  // z^(2n+1) / n!
    double sum = z;
    for (int n = 1; n < 2000; ++n)
    {
        power *= z2 / n;
        const double term = power / (2 * n + 1);
        sum += term;
        if (term <= tol * sum)
            break;
    }
    return std::exp(-z2) * sum;
}

// D(z) = z / (1 + 2z^2 - 4z^2 / (3 + 2z^2 - 8z^2 / (5 + 2z^2 - ...))),
// evaluated with the modified Lentz algorithm.
double dawson_continued_fraction(double z)
{
    constexpr double tiny = 1e-300;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double z2 = z * z;

    double f = 1.0 + 2.0 * z2;
    double c = f;
    double d = 0.0;
    for (int k = 1; k < 10000; ++k)
    {
        const double a = -4.0 * k * z2;
        const double b = 2.0 * k + 1.0 + 2.0 * z2;
        d = b + a * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 0.5 * eps)
            break;
    }
    return z / f;
}

double dawson_nonnegative(double z, const DawsonEvalConfig& config)
{
    if (z == 0.0)
        return 0.0;
    if (z <= config.series_cutoff)
        return dawson_series(z, config.series_tol);
    return dawson_continued_fraction(z);
}

} // namespace

double dawson(double z, const DawsonEvalConfig& config)
{
    if (!std::isfinite(z))
        throw std::domain_error("dawson: argument must be finite");
    config.validate();
    const double magnitude = dawson_nonnegative(std::abs(z), config);
    return std::signbit(z) ? -magnitude : magnitude;
}

double dawson(double z)
{
    static const DawsonEvalConfig defaults{};
    return dawson(z, defaults);
}

double dawson_derivative(double z)
{
    return 1.0 - 2.0 * z * dawson(z);
}

} // namespace sgnres
