#pragma once

#include "sgnres/errors.hpp"

#include <functional>
#include <span>

namespace sgnres {

struct QuadResult
{
    double value = 0.0;
    double error_estimate = 0.0;
};

struct QuadOptions
{
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    // Maximum bisection depth of any segment.
    unsigned max_depth = 40;
};

// Globally adaptive 21-point Gauss-Kronrod over [a, b].  Either limit may be
// infinite (mapped through x = a + t / (1 - t)).  Throws NumericalError when
// the error target cannot be met.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& options = {});

// Integrates piecewise over sorted breakpoints; the total error is the sum of
// the per-piece estimates.
QuadResult integrate_pieces(const std::function<double(double)>& f,
                            std::span<const double> breakpoints,
                            const QuadOptions& options = {});

} // namespace sgnres
