#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sgnres {

struct CriterionResult
{
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions
{
    std::uint64_t seed = 1;
};

// Runs every end-to-end criterion; each result carries its measured values.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

// One "PASS"/"FAIL" line per criterion; returns true when all pass.
bool report_acceptance(std::ostream& out, const std::vector<CriterionResult>& results);

} // namespace sgnres
