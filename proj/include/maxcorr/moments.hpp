#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace maxcorr {

/// One data row: predictors x_1..x_p and outcome y.
struct Observation {
  std::vector<double> x;
  double y = 0.0;
};

/// Default guard for divisions by an empirical variance.
inline constexpr double kDefaultVarFloor = 1e-12;

/// Empirical moments E_j[X_k^r Y^s], r + s <= 4, of the first j
/// observations. Only monomials with r >= 1 are stored per predictor (ten
/// per k), plus E_j[Y^s] for s = 1..4, so the state holds 10p + 4 reals
/// regardless of j.
class MomentState {
 public:
  static constexpr std::size_t kSlotsPerPredictor = 10;

  MomentState() = default;

  /// Two-point averages of every monomial. Throws std::invalid_argument on
  /// a dimension mismatch, empty x, or non-finite entries.
  static MomentState initialize(const Observation& first,
                                const Observation& second);

  /// E_{j+1} f = E_j f + (f(o) - E_j f) / (j + 1) for every stored f.
  /// O(p). Throws std::invalid_argument (state untouched) on a dimension
  /// mismatch or non-finite entry.
  void update(const Observation& o);

  std::size_t count() const { return count_; }
  std::size_t dimension() const { return dimension_; }

  /// E_j[X_k^r Y^s] for r, s >= 0 and r + s <= 4; r = 0 reads the shared
  /// y-moments and r = s = 0 is 1.
  double raw(std::size_t k, int r, int s) const;

  double mean_x(std::size_t k) const { return slots(k)[0]; }
  double mean_y() const { return y_[0]; }
  /// Population-style (divide by j) variances and covariance.
  double var_x(std::size_t k) const;
  double var_y() const;
  double cov(std::size_t k) const;

  /// Number of reals held; used to assert the O(p) storage bound.
  std::size_t stored_reals() const { return moments_.size() + y_.size(); }

 private:
  const double* slots(std::size_t k) const {
    return moments_.data() + k * kSlotsPerPredictor;
  }

  std::size_t count_ = 0;
  std::size_t dimension_ = 0;
  // Per predictor, contiguous: x, x^2, x^3, x^4, xy, xy^2, xy^3, x^2y,
  // x^2y^2, x^3y.
  std::vector<double> moments_;
  std::array<double, 4> y_{};
};

/// InitializeH: state after the first two observations.
inline MomentState initialize_h(const Observation& first,
                                const Observation& second) {
  return MomentState::initialize(first, second);
}

/// UpdateH: absorbs one observation in place.
inline void update_h(MomentState& h, const Observation& o) { h.update(o); }

/// Corr_j(X_k, Y), or 0 when either variance is at or below var_floor.
double correlation(const MomentState& h, std::size_t k,
                   double var_floor = kDefaultVarFloor);

struct CorrelationSummary {
  std::vector<double> corr;
  std::vector<double> var_x;
  double var_y = 0.0;
};

/// All p correlations plus the variances they were built from.
CorrelationSummary correlations(const MomentState& h,
                                double var_floor = kDefaultVarFloor);

}  // namespace maxcorr
