#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "maxcorr/estimator.hpp"
#include "maxcorr/gradient.hpp"
#include "maxcorr/moments.hpp"

namespace maxcorr {

struct ScreenConfig {
  double alpha = 0.05;
  double epsilon = 0.5;
  std::optional<std::size_t> ell_override;
  double sigma_floor_sq = 1e-4;
  double var_floor = kDefaultVarFloor;
  /// Unset: refit at every step. Set to c: refit at the start of each of c
  /// contiguous chunks of the estimation steps.
  std::optional<std::size_t> chunk_count;
  /// Map every value through 2/(1+exp(-z)) - 1 before use.
  bool apply_sigmoid = false;
  std::optional<std::uint64_t> seed;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct ScreenResult {
  double psi_hat = 0.0;
  double sigma_bar = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double alpha = 0.05;
  std::size_t n = 0;
  std::size_t ell_n = 0;
  bool reject_null = false;

  /// Diagnostics.
  std::size_t p = 0;
  std::size_t degenerate_steps = 0;
  /// Maximizer of the state after all n observations.
  Index final_index;
  double sum_weights = 0.0;
};

/// Pull-style ordered stream of observations.
class ObservationSource {
 public:
  virtual ~ObservationSource() = default;
  /// Writes the next observation into `out` (reusing its storage) and
  /// returns true, or returns false at end of stream.
  virtual bool next(Observation& out) = 0;
};

/// Adapts an in-memory row list.
class VectorSource final : public ObservationSource {
 public:
  explicit VectorSource(std::span<const Observation> rows) : rows_(rows) {}
  bool next(Observation& out) override;

 private:
  std::span<const Observation> rows_;
  std::size_t pos_ = 0;
};

/// 2/(1+exp(-z)) - 1, a monotone map of R onto (-1, 1).
double sigmoid_transform(double z);

/// Quantities frozen at the start of a step (or chunk): selected index, the
/// pair summary the gradient is evaluated against, plug-in and sigma_hat.
struct StepSnapshot {
  Index index;
  PairSummary at;
  double plug_in = 0.0;
  double sigma_hat = 0.0;
  bool degenerate = false;

  /// Gradient of the frozen fit at o (0 when degenerate).
  double gradient_at(const Observation& o) const;
};

StepSnapshot freeze_step(const MomentState& h, const ScreenConfig& config);

/// How the n - ell_n estimation steps are split into chunks: equal sizes
/// with the remainder in the final chunk. Fully online mode is one step per
/// chunk. A chunk count above the step count is reduced to the step count.
struct ChunkPlan {
  std::size_t chunks = 0;
  std::size_t base = 0;
  std::size_t steps = 0;

  static ChunkPlan make(std::size_t steps,
                        std::optional<std::size_t> chunk_count);
  std::size_t size(std::size_t chunk) const {
    return chunk + 1 == chunks ? steps - base * (chunks - 1) : base;
  }
};

/// Single-pass stabilized one-step estimate of max_k |Corr(X_k, Y)|.
/// Reads exactly n observations, O(np) time, O(p) memory. Throws
/// InputError if the stream ends early or the dimension changes, and
/// std::invalid_argument on bad config.
ScreenResult est_psi(ObservationSource& stream, std::size_t n,
                     const ScreenConfig& config);

/// Same, with a callback that observes the final moment state (diagnostics).
template <class OnFinalState>
ScreenResult est_psi(ObservationSource& stream, std::size_t n,
                     const ScreenConfig& config, OnFinalState&& on_final);

namespace detail {
ScreenResult est_psi_impl(ObservationSource& stream, std::size_t n,
                          const ScreenConfig& config, MomentState& state);
}

template <class OnFinalState>
ScreenResult est_psi(ObservationSource& stream, std::size_t n,
                     const ScreenConfig& config, OnFinalState&& on_final) {
  MomentState state;
  ScreenResult result = detail::est_psi_impl(stream, n, config, state);
  on_final(static_cast<const MomentState&>(state));
  return result;
}

}  // namespace maxcorr
