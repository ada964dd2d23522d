#pragma once

#include "sgnres/campaign.hpp"
#include "sgnres/csv.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgnres {

/// Bad command-line or command arguments.
class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class CurveKind
{
    direct,
    sgn,
    both,
};

CurveKind parse_curve_kind(const std::string& text);

struct CurveRange
{
    double s_min = 0.0;
    double s_max = 3.0;
    int points = 61;
};

// Rows (s, F_direct, F_sgn, F_sgn_asymptote) on an evenly spaced grid, in
// sigma units, per detection.  Columns outside `kind` are "nan".  With both
// curves, metadata carries the separation where they cross.
CsvTable cmd_fisher_curve(CurveKind kind, const CurveRange& range, unsigned threads = 1);

// Separation in (lo, hi) where the direct and signum information coincide.
double fisher_crossing(double lo, double hi);

struct ProfileRange
{
    double x_min = -3.0;
    double x_max = 3.0;
    int points = 601;
};

// Long-format rows (s, x, p, fisher_density) for each separation.
CsvTable cmd_density_profile(std::span<const double> s_list, CurveKind kind,
                             const ProfileRange& range = {});

CsvTable cmd_simulate(const ExperimentConfig& config);

CsvTable cmd_estimate(const CsvTable& scans, const ExperimentConfig& config, CalibrationMode mode);

// Fixed-width text table for terminal summaries.
std::string summarize(const CsvTable& table, std::size_t max_rows = 40);

} // namespace sgnres
