#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace esir::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& cell) {
    const std::string s = trim(cell);
    if (s.empty()) return std::nullopt;
    const char* first = s.data();
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

CsvTable read_csv(std::istream& in, std::optional<long> head) {
    CsvTable t;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (t.header.empty()) {
            if (trim(line).empty()) throw InputError("line " + std::to_string(lineno) + ": empty header row");
            for (const auto& h : split(line)) t.header.push_back(trim(h));
            continue;
        }
        if (trim(line).empty()) continue;
        if (head && static_cast<long>(t.rows.size()) >= *head) break;
        auto cells = split(line);
        if (cells.size() != t.header.size()) {
            throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                             " fields, found " + std::to_string(cells.size()));
        }
        t.rows.push_back(std::move(cells));
        t.line.push_back(lineno);
    }
    if (t.header.empty()) throw InputError("input has no header row");
    return t;
}

CsvTable read_csv_file(const std::string& path, std::optional<long> head) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    return read_csv(in, head);
}

int resolve_column(const CsvTable& t, const std::string& spec) {
    for (std::size_t j = 0; j < t.header.size(); ++j)
        if (t.header[j] == spec) return static_cast<int>(j);
    int idx = -1;
    const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), idx);
    if (ec == std::errc() && ptr == spec.data() + spec.size() && idx >= 0 &&
        idx < static_cast<int>(t.header.size()))
        return idx;
    throw InputError("no column named or indexed '" + spec + "'");
}

bool column_is_numeric(const CsvTable& t, int col) {
    for (const auto& row : t.rows) {
        if (trim(row[col]).empty()) continue;
        if (!parse_number(row[col])) return false;
    }
    return true;
}

linalg::Matrix numeric_columns(const CsvTable& t, const std::vector<int>& columns) {
    linalg::Matrix m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const auto v = parse_number(t.rows[i][columns[j]]);
            if (!v || !std::isfinite(*v)) {
                const std::string what = trim(t.rows[i][columns[j]]).empty() ? "missing value" : "non-finite or non-numeric value";
                throw InputError("line " + std::to_string(t.line[i]) + ", column '" + t.header[columns[j]] +
                                 "': " + what);
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
        }
    }
    return m;
}

}  // namespace esir::cli
