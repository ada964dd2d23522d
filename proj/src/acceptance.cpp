#include "sgnres/acceptance.hpp"

#include "sgnres/campaign.hpp"
#include "sgnres/commands.hpp"
#include "sgnres/fisher.hpp"
#include "sgnres/processor.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sgnres {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

double loglog_slope(const std::vector<double>& s, const std::vector<double>& f)
{
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        mx += std::log(s[i]);
        my += std::log(f[i]);
    }
    mx /= static_cast<double>(s.size());
    my /= static_cast<double>(s.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        const double dx = std::log(s[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(f[i]) - my);
    }
    return sxy / sxx;
}

double max_intensity_error(double step)
{
    const auto psf = gaussian_psf(1.0);
    const auto out = apply_signum(sample_field(*psf, 0.0, default_grid_points, step), 1.0);
    double err = 0.0;
    for (std::size_t n = 0; n < out.size(); ++n)
    {
        const double x = out.x(n);
        if (std::abs(x) <= 4.0)
            err = std::max(err, std::abs(std::norm(out.values[n]) - filtered_intensity_gaussian(x, 0.0, 1.0)));
    }
    return err;
}

CriterionResult timed(int id, std::string name, double limit_seconds,
                      const std::function<bool(std::ostringstream&)>& body)
{
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    std::ostringstream detail;
    detail << std::setprecision(4);
    const auto t0 = Clock::now();
    try
    {
        r.passed = body(detail);
    }
    catch (const std::exception& e)
    {
        detail << "exception: " << e.what();
        r.passed = false;
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit_seconds > 0.0 && r.seconds >= limit_seconds)
    {
        detail << "; runtime " << r.seconds << " s exceeds " << limit_seconds << " s";
        r.passed = false;
    }
    r.detail = detail.str();
    return r;
}

struct CampaignOutcome
{
    ExperimentConfig config;
    CampaignAnalysis analysis;
};

CampaignOutcome reference_campaign(std::uint64_t seed)
{
    CampaignOutcome out;
    out.config.seed = seed;
    const auto scans = run_campaign(out.config);
    out.analysis = analyze_campaign(scans, out.config, CalibrationMode::model);
    return out;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options)
{
    std::vector<CriterionResult> results;
    const auto psf = gaussian_psf(1.0);
    const auto direct = direct_family(psf);
    const auto sgn = signum_family(psf);

    results.push_back(timed(1, "asymptote fidelity", 10.0, [&](std::ostringstream& d) {
        double worst_direct = 0.0;
        for (double s : log_grid(0.01, 0.1, 12))
            worst_direct = std::max(worst_direct, std::abs(fisher_continuous(direct, s).value
                                                               / fisher_direct_asymptote(s).value
                                                           - 1.0));
        double worst_sgn = 0.0;
        for (double s : log_grid(0.005, 0.05, 12))
            worst_sgn = std::max(worst_sgn, std::abs(fisher_continuous(sgn, s).value
                                                         / fisher_sgn_asymptote(s).value
                                                     - 1.0));
        d << "max rel dev direct " << worst_direct << " (< 0.02), sgn " << worst_sgn << " (< 0.05)";
        return worst_direct < 0.02 && worst_sgn < 0.05;
    }));

    results.push_back(timed(2, "scaling-law slopes", 30.0, [&](std::ostringstream& d) {
        const auto s = log_grid(0.005, 0.05, 12);
        std::vector<double> fd;
        std::vector<double> fs;
        for (double v : s)
        {
            fd.push_back(fisher_continuous(direct, v).value);
            fs.push_back(fisher_continuous(sgn, v).value);
        }
        const double slope_d = loglog_slope(s, fd);
        const double slope_s = loglog_slope(s, fs);
        d << std::setprecision(6) << "slope direct " << slope_d << " (2 +- 0.05), sgn " << slope_s
          << " (1 +- 0.05)";
        return std::abs(slope_d - 2.0) <= 0.05 && std::abs(slope_s - 1.0) <= 0.05;
    }));

    results.push_back(timed(3, "Hilbert/Dawson oracle", 5.0, [&](std::ostringstream& d) {
        const double step = default_grid_step_per_sigma;
        const double err = max_intensity_error(step);
        const double err_half = max_intensity_error(0.5 * step);
        // Below the rounding floor further refinement cannot show a 4x gain.
        constexpr double floor = 1e-12;
        const bool converges = err_half <= 0.25 * err || (err <= floor && err_half <= floor);
        d << "max |I - I_dawson| " << err << " (< 1e-6), halved step " << err_half
          << (converges ? " (>= 4x or at 1e-12 floor)" : " (no 4x reduction)");
        return err < 1e-6 && converges;
    }));

    results.push_back(timed(4, "coefficient identity", 0.0, [&](std::ostringstream& d) {
        const double alpha = parabolic_alpha(*psf);
        const double expected = 1.0 / std::sqrt(2.0 * std::pow(std::numbers::pi, 3));
        const double rel = std::abs(alpha / expected - 1.0);
        double worst = 0.0;
        for (double s : log_grid(1e-4, 1.0, 25))
        {
            const double lhs = fisher_sgn_asymptote(s).value;
            const double rhs = 0.5 * std::numbers::pi * expected * s;
            worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
        d << "alpha rel err " << rel << " (< 1e-8); max |F_sgn_asym - (pi/2) alpha s| / F " << worst
          << " (<= 4 eps)";
        return rel < 1e-8 && worst <= 4.0 * std::numeric_limits<double>::epsilon();
    }));

    results.push_back(timed(5, "energy conservation", 0.0, [&](std::ostringstream& d) {
        double worst = 0.0;
        for (double shift : {-0.2, 0.0, 0.2})
        {
            const auto in = sample_field(*psf, shift);
            const auto out = apply_signum(in, 1.0);
            const double e_in = in.energy();
            worst = std::max(worst, std::abs(out.energy() + out_of_grid_energy(in) - e_in) / e_in);
        }
        const double inf = std::numeric_limits<double>::infinity();
        const double analytic = std::abs(sgn.at(0.4).mass(-inf, inf) - 1.0);
        d << "numeric rel change " << worst << ", analytic mixture mass dev " << analytic
          << " (both < 1e-6)";
        return worst < 1e-6 && analytic < 1e-6;
    }));

    CampaignOutcome campaign;
    bool have_campaign = false;
    double campaign_seconds = 0.0;
    const auto ensure_campaign = [&] {
        if (!have_campaign)
        {
            const auto t0 = Clock::now();
            campaign = reference_campaign(options.seed);
            campaign_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            have_campaign = true;
        }
    };

    results.push_back(timed(6, "CRLB sandwich (Monte Carlo)", 300.0, [&](std::ostringstream& d) {
        ensure_campaign();
        bool ok = true;
        for (const auto& r : campaign.analysis.reports)
        {
            const double ratio = r.stats.variance / r.crlb_pixelated;
            const bool in_band = ratio >= 0.8 && ratio <= 2.5;
            ok = ok && in_band;
            d << "s=" << r.stats.s_true << " var/CRLB_pix " << ratio << (in_band ? "" : " OUT") << "; ";
            if (std::abs(r.stats.s_true - 0.06) < 1e-12)
            {
                const double gain = r.crlb_direct / r.stats.variance;
                const bool beats = gain >= 3.0;
                ok = ok && beats;
                d << "direct CRLB / var at 0.06 = " << gain << (beats ? " (>= 3)" : " (< 3)") << "; ";
            }
        }
        d << "campaign " << campaign_seconds << " s";
        return ok;
    }));

    results.push_back(timed(7, "bias profile", 300.0, [&](std::ostringstream& d) {
        ensure_campaign();
        bool ok = true;
        for (const auto& r : campaign.analysis.reports)
        {
            const double se = r.stats.standard_error();
            const double z = r.stats.bias / se;
            if (r.stats.s_true >= 0.1 - 1e-12)
            {
                const bool unbiased = std::abs(z) <= 3.0;
                ok = ok && unbiased;
                d << "s=" << r.stats.s_true << " bias/se " << z << (unbiased ? "" : " (|z| > 3)") << "; ";
            }
            if (r.stats.s_true <= 0.042 + 1e-12)
            {
                const bool positive = r.stats.bias > 0.0;
                ok = ok && positive;
                d << "s=" << r.stats.s_true << " bias " << r.stats.bias << " (" << z << " se)"
                  << (positive ? " > 0" : " NOT > 0") << "; ";
            }
        }
        return ok;
    }));

    results.push_back(timed(8, "determinism", 0.0, [&](std::ostringstream& d) {
        ExperimentConfig config;
        config.seed = options.seed;
        config.n_scans = 20;
        std::ostringstream first;
        std::ostringstream second;
        write_csv(first, cmd_simulate(config));
        write_csv(second, cmd_simulate(config));
        const bool same = first.str() == second.str();
        d << "two runs " << (same ? "byte-identical" : "differ") << " (" << first.str().size()
          << " bytes)";
        return same;
    }));

    return results;
}

bool report_acceptance(std::ostream& out, const std::vector<CriterionResult>& results)
{
    bool all = true;
    for (const auto& r : results)
    {
        all = all && r.passed;
        out << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail
            << "  (" << std::fixed << std::setprecision(2) << r.seconds << " s)" << std::defaultfloat
            << '\n';
    }
    out << (all ? "all criteria passed" : "some criteria FAILED") << '\n';
    return all;
}

} // namespace sgnres
