#include "sgnres/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace sgnres {

std::string CsvTable::meta(const std::string& key) const
{
    for (const auto& [k, v] : metadata)
        if (k == key)
            return v;
    return {};
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw std::out_of_range("CsvTable: no column named '" + name + "'");
}

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_number(const std::string& text)
{
    if (text == "inf")
        return std::numeric_limits<double>::infinity();
    if (text == "-inf")
        return -std::numeric_limits<double>::infinity();
    if (text == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw std::invalid_argument("parse_number: '" + text + "' is not a number");
    return value;
}

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i)
    {
        if (i)
            out << ',';
        out << fields[i];
    }
    out << '\n';
}

} // namespace

void write_csv(std::ostream& out, const CsvTable& table)
{
    for (const auto& [k, v] : table.metadata)
        out << "# " << k << '=' << v << '\n';
    write_row(out, table.header);
    for (const auto& row : table.rows)
        write_row(out, row);
}

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line))
    {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.front() == '#')
        {
            auto body = line.substr(1);
            if (!body.empty() && body.front() == ' ')
                body.erase(0, 1);
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                table.metadata.emplace_back(body, "");
            else
                table.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        auto fields = split_fields(line);
        if (!have_header)
        {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size())
            throw std::runtime_error("read_csv: row has " + std::to_string(fields.size())
                                     + " fields, header has " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(fields));
    }
    if (!have_header)
        throw std::runtime_error("read_csv: missing header row");
    return table;
}

CsvTable scans_to_table(std::span<const ScanRecord> scans)
{
    CsvTable table;
    table.metadata.emplace_back("format", scan_format);
    table.header = {"scan_id", "seed", "true_s"};
    const std::size_t m = scans.empty() ? 0 : scans.front().counts.size();
    for (std::size_t i = 0; i < m; ++i)
        table.header.push_back("pixel_" + std::to_string(i));
    for (std::size_t k = 0; k < scans.size(); ++k)
    {
        const auto& scan = scans[k];
        if (scan.counts.size() != m)
            throw std::invalid_argument("scans_to_table: scans differ in length");
        std::vector<std::string> row{std::to_string(k), std::to_string(scan.seed),
                                     format_number(scan.true_s)};
        for (double c : scan.counts)
            row.push_back(format_number(c));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<ScanRecord> scans_from_table(const CsvTable& table)
{
    const std::size_t seed_col = table.column("seed");
    const std::size_t s_col = table.column("true_s");
    const std::size_t first_pixel = table.column("pixel_0");
    std::vector<ScanRecord> scans;
    for (const auto& row : table.rows)
    {
        ScanRecord scan;
        scan.seed = std::stoull(row[seed_col]);
        scan.true_s = parse_number(row[s_col]);
        double total = 0.0;
        for (std::size_t i = first_pixel; i < row.size(); ++i)
        {
            scan.counts.push_back(parse_number(row[i]));
            total += scan.counts.back();
        }
        scan.n_emitted = static_cast<std::uint64_t>(std::llround(total));
        scans.push_back(std::move(scan));
    }
    return scans;
}

} // namespace sgnres
