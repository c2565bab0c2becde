#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maxcorr/moments.hpp"
#include "maxcorr/rng.hpp"
#include "maxcorr/screen.hpp"

namespace maxcorr {

/// Outcome models of the power study. IE: homoscedastic error tau_1,
/// DE: heteroscedastic error sum_k X_k tau_k / sqrt(p).
enum class Model { NIE, A1IE, A2IE, NDE, A1DE, A2DE, A3IE, A4IE };

enum class Method { StabilizedOneStep, BonferroniT };

std::string_view to_string(Model model);
std::string_view to_string(Method method);
/// Accepts the dotted names ("N.IE", "A1.DE", ...). Throws InputError.
Model parse_model(std::string_view name);
/// Accepts "stabilized_one_step" and "bonferroni_t". Throws InputError.
Method parse_method(std::string_view name);

/// Number of leading predictors the model's mean depends on.
std::size_t support_size(Model model);
bool is_null(Model model);

struct ScenarioSpec {
  Model model = Model::NIE;
  std::size_t n = 500;
  std::size_t p = 200;
  double rho = 0.0;
  std::size_t reps = 500;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  Method method = Method::StabilizedOneStep;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct PowerRow {
  ScenarioSpec spec;
  std::size_t rejections = 0;
  double power = 0.0;
  double mc_stderr = 0.0;
};

/// sqrt(rho) * W + sqrt(1 - rho) * Z_k: unit variances, pairwise
/// correlation rho, O(p) per row. Throws std::invalid_argument unless
/// rho is in [0, 1).
void gen_design_row(double rho, Rng& rng, std::span<double> out);
std::vector<double> gen_design_row(std::size_t p, double rho, Rng& rng);

/// Noise-free part of the outcome (the regression function).
double outcome_signal(Model model, std::span<const double> x);
/// Error term: tau_1 for IE models, sum_k x_k tau_k / sqrt(p) for DE models.
double outcome_noise(Model model, std::span<const double> x, Rng& rng);
/// signal + noise. Throws std::invalid_argument if x is shorter than the
/// model's support.
double gen_outcome(Model model, std::span<const double> x, Rng& rng);

/// Streams n rows of one replication without materializing the data.
class SimulatedSource final : public ObservationSource {
 public:
  SimulatedSource(const ScenarioSpec& spec, Rng rng);
  bool next(Observation& out) override;

 private:
  ScenarioSpec spec_;
  Rng rng_;
  std::size_t produced_ = 0;
};

/// Per-predictor correlation t-tests, streamed with O(p) state.
class CorrelationTTests {
 public:
  explicit CorrelationTTests(std::size_t p);
  void add(const Observation& o);

  std::size_t count() const { return count_; }
  /// Two-sided p-value of predictor k (1 for a degenerate column).
  double p_value(std::size_t k) const;
  double correlation(std::size_t k) const;
  /// min_k p_k <= alpha / p. Throws std::invalid_argument if fewer than 3 rows.
  bool bonferroni_reject(double alpha) const;

 private:
  std::size_t count_ = 0;
  double mean_y_ = 0.0;
  double m2_y_ = 0.0;
  std::vector<double> mean_x_;
  std::vector<double> m2_x_;
  std::vector<double> c_xy_;
};

/// Bonferroni-corrected t-test on an in-memory data set.
bool bonferroni_t_test(std::span<const Observation> rows, double alpha);

struct StudyOptions {
  /// Chunking used by the stabilized one-step method.
  std::optional<std::size_t> chunk_count = 10;
  unsigned threads = 1;
};

/// One replication: true when the method rejects Psi = 0 at level alpha.
/// The stabilized one-step test rejects when the lower bound of the
/// (1 - 2 alpha) interval is positive.
bool run_replication(const ScenarioSpec& spec, std::size_t replication,
                     const StudyOptions& options = {});

/// Runs every scenario; replication r of a scenario draws from
/// Rng::substream(spec.seed, r), so output depends only on the specs.
std::vector<PowerRow> run_power_study(std::span<const ScenarioSpec> specs,
                                      const StudyOptions& options = {});

}  // namespace maxcorr
