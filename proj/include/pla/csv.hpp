#pragma once

#include "pla/covariance.hpp"
#include "pla/linalg.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pla::io {

enum class InputKind { data, covariance };

InputKind input_kind_from_string(std::string_view s);

struct CsvMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> header;  // empty when the first row was numeric
};

// Comma-separated decimal numbers, one row per line. The first row is taken
// as a header when any of its cells is not a number. Blank lines are
// skipped. Errors name the 1-based line and column.
CsvMatrix parse_csv(std::string_view text, std::string_view source = "<input>");

CsvMatrix read_csv_file(const std::filesystem::path& path);

DataMatrix to_data(CsvMatrix csv);

// Requires a square table whose transpose differs by at most 1e-8 entrywise.
SymmetricMatrix to_covariance(const CsvMatrix& csv, std::string_view source = "<input>");

using LoadedMatrix = std::variant<DataMatrix, SymmetricMatrix>;
LoadedMatrix read_matrix(const std::filesystem::path& path, InputKind kind);

}  // namespace pla::io
