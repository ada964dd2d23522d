#pragma once

namespace sgnres {

/// Evaluation policy for Dawson's integral.
///
/// Arguments with |z| <= series_cutoff use the power series of
/// exp(-z^2) * sum z^(2n+1) / (n! (2n+1)); larger arguments use the
/// Laplace continued fraction.  Both branches are pure.
struct DawsonEvalConfig
{
    double series_cutoff = 5.0;
    double series_tol = 1e-17;

    // Throws std::invalid_argument unless cutoff > 0 and 0 < tol < 1e-10.
    void validate() const;
};

// D(z) = exp(-z^2) * integral_0^z exp(t^2) dt.  Throws std::domain_error for
// non-finite z.
double dawson(double z);
double dawson(double z, const DawsonEvalConfig& config);

// D'(z) = 1 - 2 z D(z).
double dawson_derivative(double z);

} // namespace sgnres
