#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esir/linalg.hpp"

namespace esir::cli {

/// Input problems (bad CSV, unknown column, bad flag values). Maps to exit 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw comma-separated table: header names plus unparsed cells. `line` holds
/// the 1-based file line of each data row (the header is line 1).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<long> line;
};

CsvTable read_csv(std::istream& in, std::optional<long> head = std::nullopt);
CsvTable read_csv_file(const std::string& path, std::optional<long> head = std::nullopt);

/// Column by exact header name, or by 0-based index when `spec` is an integer
/// that names no header.
int resolve_column(const CsvTable& t, const std::string& spec);

/// A column is numeric unless some non-empty cell fails to parse as a number.
bool column_is_numeric(const CsvTable& t, int col);

/// n x columns.size() matrix; an empty or non-finite cell is an InputError
/// that names the line and the column.
linalg::Matrix numeric_columns(const CsvTable& t, const std::vector<int>& columns);

}  // namespace esir::cli
