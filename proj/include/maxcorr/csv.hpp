#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "maxcorr/moments.hpp"
#include "maxcorr/screen.hpp"

namespace maxcorr {

/// Streams observations out of comma-separated text with a mandatory header
/// row. Holds one line and the header in memory. Cells are parsed as plain
/// decimal numbers ('.' separator, no quoting); blank lines are skipped.
class CsvObservationReader final : public ObservationSource {
 public:
  /// y_column: a header name, or a 1-based column number. Unset selects the
  /// column named "y" if present, else the last column. Throws InputError on
  /// a missing/empty header, a header with fewer than two columns or an
  /// unknown y column.
  CsvObservationReader(std::istream& in,
                       std::optional<std::string> y_column = std::nullopt);

  /// Throws InputError naming the row and column for non-numeric cells and
  /// ragged rows.
  bool next(Observation& out) override;

  std::size_t dimension() const { return predictor_names_.size(); }
  const std::vector<std::string>& predictor_names() const {
    return predictor_names_;
  }
  const std::string& y_name() const { return y_name_; }
  /// Data rows returned so far.
  std::size_t rows_read() const { return rows_; }

 private:
  std::istream& in_;
  std::vector<std::string> header_;
  std::vector<std::string> predictor_names_;
  std::string y_name_;
  std::size_t y_index_ = 0;
  std::size_t rows_ = 0;
  std::size_t line_no_ = 1;
  std::string line_;
};

/// Number of non-blank lines after the header.
std::size_t count_data_rows(std::istream& in);

/// Splits one CSV line on commas (no quoting), trimming spaces and a
/// trailing carriage return.
std::vector<std::string> split_csv_line(const std::string& line);

/// Parses a whole decimal number; nullopt unless the cell is entirely numeric
/// and finite.
std::optional<double> parse_number(const std::string& cell);

}  // namespace maxcorr
