#include "pla/csv.hpp"

#include "pla/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pla::io {

InputKind input_kind_from_string(std::string_view s) {
  if (s == "data") return InputKind::data;
  if (s == "cov" || s == "covariance") return InputKind::covariance;
  throw InvalidInput("unknown input kind '" + std::string(s) + "' (expected data or cov)");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::string where(std::string_view source, std::size_t line, std::size_t col) {
  return std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

CsvMatrix parse_csv(std::string_view text, std::string_view source) {
  CsvMatrix out;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool first_content_line = true;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    const auto cells = split_cells(line);
    if (first_content_line) {
      first_content_line = false;
      width = cells.size();
      bool all_numeric = true;
      double dummy = 0.0;
      for (auto c : cells) all_numeric = all_numeric && parse_number(c, dummy);
      if (!all_numeric) {
        for (auto c : cells) out.header.emplace_back(c);
        continue;
      }
    }
    if (cells.size() != width) {
      throw InvalidInput(where(source, line_no, 1) + ": expected " + std::to_string(width) +
                         " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (!parse_number(cells[c], row[c]) || !std::isfinite(row[c])) {
        throw InvalidInput(where(source, line_no, c + 1) + ": not a finite number: '" +
                           std::string(cells[c]) + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput(std::string(source) + ": no numeric rows");

  out.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      out.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return out;
}

CsvMatrix read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw InvalidInput("error reading '" + path.string() + "'");
  return parse_csv(buf.str(), path.string());
}

DataMatrix to_data(CsvMatrix csv) {
  DataMatrix d;
  d.rows = std::move(csv.values);
  d.column_names = std::move(csv.header);
  return d;
}

SymmetricMatrix to_covariance(const CsvMatrix& csv, std::string_view source) {
  const auto& v = csv.values;
  if (v.rows() != v.cols()) {
    throw InvalidInput(std::string(source) + ": covariance must be square, got " +
                       std::to_string(v.rows()) + "x" + std::to_string(v.cols()));
  }
  for (Index i = 0; i < v.rows(); ++i) {
    for (Index j = i + 1; j < v.cols(); ++j) {
      if (std::abs(v(i, j) - v(j, i)) > 1e-8) {
        throw InvalidInput(std::string(source) + ": covariance not symmetric at row " +
                           std::to_string(i + 1) + ", column " + std::to_string(j + 1));
      }
    }
  }
  return SymmetricMatrix(v);
}

LoadedMatrix read_matrix(const std::filesystem::path& path, InputKind kind) {
  CsvMatrix csv = read_csv_file(path);
  if (kind == InputKind::covariance) return to_covariance(csv, path.string());
  return to_data(std::move(csv));
}

}  // namespace pla::io
