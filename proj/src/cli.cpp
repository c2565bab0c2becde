#include "maxcorr/cli.hpp"

#include <atomic>
#include <map>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "maxcorr/csv.hpp"
#include "maxcorr/error.hpp"
#include "maxcorr/report.hpp"
#include "maxcorr/screen.hpp"
#include "maxcorr/simulation.hpp"

namespace maxcorr {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

// Warns once when a value falls outside [-1, 1].
class RangeCheckingSource final : public ObservationSource {
 public:
  RangeCheckingSource(ObservationSource& inner, std::ostream& err)
      : inner_(inner), err_(err) {}

  bool next(Observation& out) override {
    if (!inner_.next(out)) return false;
    ++row_;
    if (!warned_) {
      bool outside = std::fabs(out.y) > 1.0;
      for (double v : out.x) outside = outside || std::fabs(v) > 1.0;
      if (outside) {
        err_ << "warning: row " << row_
             << " has values outside [-1, 1]; continuing without a range "
                "guarantee (use --sigmoid to map into (-1, 1))\n";
        warned_ = true;
      }
    }
    return true;
  }

 private:
  ObservationSource& inner_;
  std::ostream& err_;
  std::size_t row_ = 0;
  bool warned_ = false;
};

// Copies a non-seekable stream to a temporary file so it can be read twice.
class SpooledInput {
 public:
  explicit SpooledInput(std::istream& in) {
    static std::atomic<unsigned> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("maxcorr-stdin-" + std::to_string(stamp) + "-" +
             std::to_string(counter++) + ".csv");
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create spool file " + path_.string());
    out << in.rdbuf();
  }
  ~SpooledInput() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  SpooledInput(const SpooledInput&) = delete;
  SpooledInput& operator=(const SpooledInput&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path.string() + "'");
  return in;
}

ScreenReport screen_file(const std::filesystem::path& path, const ScreenCommand& cmd,
                         std::ostream& err) {
  std::size_t n = 0;
  {
    auto counting = open_input(path);
    n = count_data_rows(counting);
  }
  if (n < 4) {
    throw InputError("need at least 4 data rows, '" + path.string() + "' has " +
                     std::to_string(n));
  }

  auto in = open_input(path);
  CsvObservationReader reader(in, cmd.y_column);
  ScreenConfig config;
  config.alpha = cmd.alpha;
  config.epsilon = cmd.epsilon;
  config.ell_override = cmd.ell_override;
  config.chunk_count = cmd.chunk_count;
  config.apply_sigmoid = cmd.sigmoid;

  ScreenReport report;
  report.y_name = reader.y_name();
  report.predictor_names = reader.predictor_names();
  auto keep_top = [&](const MomentState& h) {
    report.top = top_correlations(h, 10, config.var_floor);
  };
  if (cmd.sigmoid) {
    report.result = est_psi(reader, n, config, keep_top);
  } else {
    RangeCheckingSource checked(reader, err);
    report.result = est_psi(checked, n, config, keep_top);
  }
  return report;
}

OutputFormat format_for(const SimulateCommand& cmd) {
  if (cmd.format) return *cmd.format;
  return std::filesystem::path(cmd.out_path).extension() == ".json" ? OutputFormat::Json
                                                                     : OutputFormat::Csv;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace

int run_screen(const ScreenCommand& cmd, std::istream& in, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    ScreenReport report;
    if (cmd.input_path) {
      report = screen_file(*cmd.input_path, cmd, err);
    } else {
      SpooledInput spool(in);
      report = screen_file(spool.path(), cmd, err);
    }
    if (cmd.format == OutputFormat::Json) {
      out << to_json(report).dump(2) << '\n';
    } else {
      out << to_csv(report);
    }
    return kExitOk;
  });
}

int run_simulate(const SimulateCommand& cmd, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream grid_in(cmd.grid_path);
    if (!grid_in) throw InputError("cannot open grid file '" + cmd.grid_path + "'");
    GridDefaults defaults;
    defaults.reps_override = cmd.reps;
    defaults.seed_override = cmd.seed;
    const auto specs = parse_grid(grid_in, defaults);

    StudyOptions options;
    options.chunk_count = cmd.chunk_count;
    options.threads = cmd.threads;
    const auto rows = run_power_study(specs, options);

    std::ofstream out(cmd.out_path, std::ios::binary);
    if (!out) throw InputError("cannot write output file '" + cmd.out_path + "'");
    if (format_for(cmd) == OutputFormat::Json) {
      out << power_to_json(rows).dump(2) << '\n';
    } else {
      write_power_csv(out, rows);
    }
    if (!out) throw std::runtime_error("failed writing '" + cmd.out_path + "'");
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Maximal-correlation screening with stabilized one-step confidence intervals"};
  app.require_subcommand(1);

  const std::map<std::string, OutputFormat> formats{{"json", OutputFormat::Json},
                                                    {"csv", OutputFormat::Csv}};

  ScreenCommand screen;
  auto* screen_cmd = app.add_subcommand("screen", "Estimate max |corr(X_k, Y)| from a CSV file");
  screen_cmd->add_option("--input", screen.input_path, "CSV file (default: standard input)");
  screen_cmd->add_option("--y-col", screen.y_column, "Outcome column name or 1-based number");
  screen_cmd->add_option("--alpha", screen.alpha, "Two-sided interval level is 1 - alpha")
      ->check(CLI::Range(0.0, 1.0));
  screen_cmd->add_option("--epsilon", screen.epsilon, "Burn-in exponent, in (0, 2)");
  screen_cmd->add_option("--ell", screen.ell_override, "Override the burn-in length");
  screen_cmd->add_option("--chunks", screen.chunk_count, "Refit only at the start of C chunks");
  screen_cmd->add_flag("--sigmoid", screen.sigmoid, "Map all values into (-1, 1) first");
  screen_cmd->add_option("--format", screen.format, "json or csv")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  SimulateCommand simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo power study");
  sim_cmd->add_option("--grid", simulate.grid_path, "Scenario grid CSV")->required();
  sim_cmd->add_option("--out", simulate.out_path, "Power table output path")->required();
  sim_cmd->add_option("--seed", simulate.seed, "Seed for every scenario");
  sim_cmd->add_option("--reps", simulate.reps, "Replications per scenario");
  sim_cmd->add_option("--chunks", simulate.chunk_count, "Chunks for the stabilized method (0: online)");
  sim_cmd->add_option("--threads", simulate.threads, "Worker threads")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--format", simulate.format, "json or csv (default: by extension)")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  if (screen_cmd->parsed()) return run_screen(screen, in, out, err);
  if (simulate.chunk_count && *simulate.chunk_count == 0) simulate.chunk_count.reset();
  return run_simulate(simulate, err);
}

}  // namespace maxcorr
