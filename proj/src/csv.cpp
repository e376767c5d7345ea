#include "drlab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "drlab/errors.hpp"

namespace drlab {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& s, std::size_t line) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ConfigError("csv line " + std::to_string(line) + ": not a number: '" + s + "'");
    return x;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& os, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

std::string to_csv(const CsvTable& table) {
    std::ostringstream os;
    write_csv(os, table);
    return os.str();
}

CsvTable parse_csv(std::istream& is, const std::vector<std::string>& expected) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.header = split(line);
    if (!expected.empty() && t.header != expected) throw ConfigError("csv: unexpected header '" + line + "'");
    std::size_t n = 1;
    while (std::getline(is, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size())
            throw ConfigError("csv line " + std::to_string(n) + ": expected " + std::to_string(t.header.size()) +
                              " cells");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_cell(c, n));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected) {
    std::istringstream is(text);
    return parse_csv(is, expected);
}

CsvTable read_csv_file(const std::string& path, const std::vector<std::string>& expected) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return parse_csv(in, expected);
}

void write_csv_file(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    write_csv(out, table);
    if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace drlab
