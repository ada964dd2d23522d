#include "sgnres/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace sgnres {

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> xgk{
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> wgk{
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077746549506386, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes.
constexpr std::array<double, 5> wg{
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment
{
    double a;
    double b;
    double value;
    double error;
    double l1;
    int depth;

    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod21(const F& f, double a, double b, int depth)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * wgk[10];
    double l1 = std::abs(fc) * wgk[10];
    double gauss = 0.0;
    for (int j = 0; j < 10; ++j)
    {
        const double dx = half * xgk[static_cast<std::size_t>(j)];
        const double f1 = f(centre - dx);
        const double f2 = f(centre + dx);
        kronrod += wgk[static_cast<std::size_t>(j)] * (f1 + f2);
        l1 += wgk[static_cast<std::size_t>(j)] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1)
            gauss += wg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
    }
    Segment seg{a, b, kronrod * half, std::abs((kronrod - gauss) * half), l1 * std::abs(half), depth};
    // Rounding floor: no rule can beat ~50 eps of the absolute integrand mass.
    seg.error = std::max(seg.error, 50.0 * std::numeric_limits<double>::epsilon() * seg.l1);
    return seg;
}

template <class F>
QuadResult adaptive(const F& f, double a, double b, const QuadOptions& options)
{
    std::priority_queue<Segment> queue;
    const Segment first = gauss_kronrod21(f, a, b, 0);
    double value = first.value;
    double error = first.error;
    double l1 = first.l1;
    queue.push(first);
    const int max_segments = 1 << 14;
    int segments = 1;
    const auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(value)); };
    const double eps_floor = 100.0 * std::numeric_limits<double>::epsilon();

    while (error > target() && error > eps_floor * l1)
    {
        const Segment worst = queue.top();
        if (worst.depth >= static_cast<int>(options.max_depth) || segments >= max_segments)
        {
            std::ostringstream msg;
            msg << "integrate: no convergence on [" << a << ", " << b << "]: estimate " << value
                << ", error " << error << ", worst segment [" << worst.a << ", " << worst.b << "]";
            throw NumericalError(msg.str());
        }
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Segment left = gauss_kronrod21(f, worst.a, mid, worst.depth + 1);
        const Segment right = gauss_kronrod21(f, mid, worst.b, worst.depth + 1);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        queue.push(left);
        queue.push(right);
        ++segments;
    }

    // Re-sum to shed the drift of the running totals.
    QuadResult result;
    while (!queue.empty())
    {
        result.value += queue.top().value;
        result.error_estimate += queue.top().error;
        queue.pop();
    }
    return result;
}

} // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& options)
{
    if (a == b)
        return {};
    if (a > b)
    {
        auto r = integrate(f, b, a, options);
        r.value = -r.value;
        return r;
    }

    QuadResult result;
    const bool lower_inf = std::isinf(a);
    const bool upper_inf = std::isinf(b);
    if (!lower_inf && !upper_inf)
    {
        result = adaptive(f, a, b, options);
    }
    else if (lower_inf && upper_inf)
    {
        auto left = integrate(f, a, 0.0, options);
        auto right = integrate(f, 0.0, b, options);
        result = {left.value + right.value, left.error_estimate + right.error_estimate};
    }
    else
    {
        // x = origin +- t / (1 - t), t in [0, 1).
        const double origin = lower_inf ? b : a;
        const double dir = lower_inf ? -1.0 : 1.0;
        const auto g = [&](double t) {
            if (t >= 1.0)
                return 0.0;
            const double u = 1.0 - t;
            const double v = f(origin + dir * t / u);
            return v == 0.0 ? 0.0 : v / (u * u);
        };
        result = adaptive(g, 0.0, 1.0, options);
    }

    if (!std::isfinite(result.value))
    {
        std::ostringstream msg;
        msg << "integrate: non-finite result on [" << a << ", " << b << "]";
        throw NumericalError(msg.str());
    }
    return result;
}

QuadResult integrate_pieces(const std::function<double(double)>& f,
                            std::span<const double> breakpoints, const QuadOptions& options)
{
    // A coarse pass sets one absolute target for all pieces, so negligible
    // pieces (far tails) are not refined to their own relative tolerance.
    double rough = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    {
        QuadOptions coarse = options;
        coarse.rel_tol = 1e-3;
        coarse.abs_tol = 0.0;
        try
        {
            rough += std::abs(integrate(f, breakpoints[i], breakpoints[i + 1], coarse).value);
        }
        catch (const NumericalError&)
        {
        }
    }
    QuadOptions fine = options;
    const double pieces = static_cast<double>(breakpoints.size() - 1);
    fine.abs_tol = std::max(options.abs_tol, options.rel_tol * rough / pieces);

    QuadResult total;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    {
        const auto piece = integrate(f, breakpoints[i], breakpoints[i + 1], fine);
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
    }
    return total;
}

} // namespace sgnres
