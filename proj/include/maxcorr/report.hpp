#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxcorr/moments.hpp"
#include "maxcorr/screen.hpp"
#include "maxcorr/simulation.hpp"

namespace maxcorr {

inline constexpr const char* kScreenResultSchema = "screen-result/1";
inline constexpr const char* kPowerTableSchema = "power-table/1";

struct RankedPredictor {
  std::size_t k = 0;  // 0-based
  double corr = 0.0;
};

/// A screen result plus the diagnostics printed next to it.
struct ScreenReport {
  ScreenResult result;
  std::string y_name;
  std::vector<std::string> predictor_names;
  std::vector<RankedPredictor> top;
};

/// Up to `count` predictors with the largest |Corr| in h, ties by index.
std::vector<RankedPredictor> top_correlations(const MomentState& h,
                                              std::size_t count,
                                              double var_floor = kDefaultVarFloor);

nlohmann::ordered_json to_json(const ScreenReport& report);
/// Header line plus one row of the scalar fields.
std::string to_csv(const ScreenReport& report);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

inline constexpr const char* kPowerCsvHeader =
    "model,n,p,rho,method,reps,rejections,power,mc_stderr";

void write_power_csv(std::ostream& out, std::span<const PowerRow> rows);
nlohmann::ordered_json power_to_json(std::span<const PowerRow> rows);

/// Values used for grid columns a file leaves out.
struct GridDefaults {
  std::size_t reps = 500;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  /// When set, these replace whatever the grid file says.
  std::optional<std::size_t> reps_override;
  std::optional<std::uint64_t> seed_override;
};

/// Scenario grid: CSV with header. Required columns model,n,p,rho,method;
/// optional reps,alpha,seed. Throws InputError naming the line on bad rows.
std::vector<ScenarioSpec> parse_grid(std::istream& in, const GridDefaults& defaults);

}  // namespace maxcorr
