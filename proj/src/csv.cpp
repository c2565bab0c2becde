#include "maxcorr/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "maxcorr/error.hpp"

namespace maxcorr {
namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool all_digits(const std::string& s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    cells.emplace_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

CsvObservationReader::CsvObservationReader(std::istream& in,
                                           std::optional<std::string> y_column)
    : in_(in) {
  std::string header_line;
  if (!std::getline(in_, header_line) || is_blank(header_line)) {
    throw InputError("CSV input has no header row");
  }
  header_ = split_csv_line(header_line);
  if (header_.size() < 2) {
    throw InputError("CSV header needs at least one predictor and an outcome column");
  }

  if (y_column) {
    const auto named = std::find(header_.begin(), header_.end(), *y_column);
    if (named != header_.end()) {
      y_index_ = static_cast<std::size_t>(named - header_.begin());
    } else if (all_digits(*y_column)) {
      const auto idx = std::stoul(*y_column);
      if (idx < 1 || idx > header_.size()) {
        throw InputError("y column number " + *y_column + " is out of range 1.." +
                         std::to_string(header_.size()));
      }
      y_index_ = idx - 1;
    } else {
      throw InputError("y column \"" + *y_column + "\" not found in header");
    }
  } else {
    const auto named = std::find(header_.begin(), header_.end(), "y");
    y_index_ = named != header_.end()
                   ? static_cast<std::size_t>(named - header_.begin())
                   : header_.size() - 1;
  }
  y_name_ = header_[y_index_];
  for (std::size_t c = 0; c < header_.size(); ++c) {
    if (c != y_index_) predictor_names_.push_back(header_[c]);
  }
}

bool CsvObservationReader::next(Observation& out) {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (is_blank(line_)) continue;
    ++rows_;
    out.x.resize(predictor_names_.size());
    std::string_view rest(line_);
    std::size_t col = 0;
    std::size_t xk = 0;
    std::string cell;
    while (true) {
      const auto comma = rest.find(',');
      if (col >= header_.size()) {
        throw InputError("row " + std::to_string(rows_) + " (line " +
                         std::to_string(line_no_) + ") has more than " +
                         std::to_string(header_.size()) + " cells");
      }
      cell.assign(trim(rest.substr(0, comma)));
      const auto value = parse_number(cell);
      if (!value) {
        throw InputError("row " + std::to_string(rows_) + " (line " +
                         std::to_string(line_no_) + "), column \"" +
                         header_[col] + "\": non-numeric value '" + cell + "'");
      }
      if (col == y_index_) {
        out.y = *value;
      } else {
        out.x[xk++] = *value;
      }
      ++col;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (col != header_.size()) {
      throw InputError("row " + std::to_string(rows_) + " (line " +
                       std::to_string(line_no_) + ") has " + std::to_string(col) +
                       " cells, header has " + std::to_string(header_.size()));
    }
    return true;
  }
  if (in_.bad()) throw InputError("read error on CSV input");
  return false;
}

std::size_t count_data_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!is_blank(line)) ++rows;
  }
  return rows;
}

}  // namespace maxcorr
