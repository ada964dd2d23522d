#pragma once

#include "sgnres/camera.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sgnres {

/// Plain comma-separated tables with '# key=value' metadata lines ahead of
/// the header row.
struct CsvTable
{
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Value of the first metadata entry with this key, or "".
    std::string meta(const std::string& key) const;
    // Index of a header column; throws std::out_of_range.
    std::size_t column(const std::string& name) const;
};

// Shortest decimal text that reads back to the same double; "inf"/"-inf"/"nan"
// for non-finite values.
std::string format_number(double value);
double parse_number(const std::string& text);

void write_csv(std::ostream& out, const CsvTable& table);
// Throws std::runtime_error on ragged rows or a missing header.
CsvTable read_csv(std::istream& in);

inline constexpr const char* scan_format = "sgnres-scans/1";
inline constexpr const char* stats_format = "sgnres-stats/1";
inline constexpr const char* fisher_format = "sgnres-fisher-curve/1";
inline constexpr const char* density_format = "sgnres-density/1";

// Columns: scan_id, seed, true_s, pixel_0 .. pixel_{M-1}.
CsvTable scans_to_table(std::span<const ScanRecord> scans);
// n_emitted is reconstructed as the rounded column sum.
std::vector<ScanRecord> scans_from_table(const CsvTable& table);

} // namespace sgnres
