#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace maxcorr {

enum class OutputFormat { Json, Csv };

struct ScreenCommand {
  std::optional<std::string> input_path;  // unset: standard input
  std::optional<std::string> y_column;
  double alpha = 0.05;
  double epsilon = 0.5;
  std::optional<std::size_t> ell_override;
  std::optional<std::size_t> chunk_count;
  bool sigmoid = false;
  OutputFormat format = OutputFormat::Json;
};

struct SimulateCommand {
  std::string grid_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> chunk_count = 10;
  unsigned threads = 1;
  std::optional<OutputFormat> format;  // unset: from the output extension
};

/// Exit codes: 0 success, 1 internal error, 2 input error.
int run_screen(const ScreenCommand& cmd, std::istream& in, std::ostream& out,
               std::ostream& err);
int run_simulate(const SimulateCommand& cmd, std::ostream& err);

/// Full command line: `screen ...` or `simulate ...`.
int run_cli(int argc, const char* const* argv, std::istream& in,
            std::ostream& out, std::ostream& err);

}  // namespace maxcorr
