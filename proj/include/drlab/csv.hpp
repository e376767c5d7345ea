#pragma once

// Numeric CSV tables with a one-line header. Values are written with 17
// significant digits so every table re-parses to the same doubles.

#include <iosfwd>
#include <string>
#include <vector>

namespace drlab {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

[[nodiscard]] std::string format_double(double x);

void write_csv(std::ostream& os, const CsvTable& table);
[[nodiscard]] std::string to_csv(const CsvTable& table);

/// Throws ConfigError on ragged rows, non-numeric cells or, when `expected`
/// is non-empty, a header that differs from it.
[[nodiscard]] CsvTable parse_csv(std::istream& is, const std::vector<std::string>& expected = {});
[[nodiscard]] CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected = {});

[[nodiscard]] CsvTable read_csv_file(const std::string& path, const std::vector<std::string>& expected = {});
void write_csv_file(const std::string& path, const CsvTable& table);

}  // namespace drlab
