#pragma once

#include <cstddef>

#include "maxcorr/moments.hpp"

namespace maxcorr {

/// Candidate index d = (k, m). k is 0-based here; reports convert to 1-based.
/// The parameter indexed by d is m * Corr(X_k, Y).
struct Index {
  std::size_t k = 0;
  int m = 1;

  friend bool operator==(const Index&, const Index&) = default;
};

/// Means, standard deviations and correlation of (X_k, Y) under some
/// distribution. Enough to evaluate the gradient and the exact remainder.
struct PairSummary {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sd_x = 0.0;
  double sd_y = 0.0;
  double corr = 0.0;
};

/// A value together with a degenerate-variance flag.
struct FlaggedValue {
  double value = 0.0;
  bool degenerate = false;
};

/// Summary of predictor k under the empirical state. `degenerate` is set when
/// either variance is at or below var_floor (corr is then 0).
struct PairState {
  PairSummary summary;
  bool degenerate = false;
};
PairState pair_state(const MomentState& h, std::size_t k,
                     double var_floor = kDefaultVarFloor);

/// argmax_k |Corr_j(X_k, Y)|, smallest k on ties, m = sign (m = +1 at 0).
Index maximizer(const MomentState& h, double var_floor = kDefaultVarFloor);

/// Canonical gradient of m * Corr(X_k, Y) at the distribution described by
/// `at`, evaluated at (x_k, y):
///   m * [ (x-mx)(y-my)/(sx sy) - corr/2 * ((x-mx)^2/sx^2 + (y-my)^2/sy^2) ]
double gradient(const PairSummary& at, int m, double x_k, double y);

/// CalcD: gradient at the empirical distribution of h, evaluated at o.
/// Returns 0 flagged degenerate when a variance is at or below var_floor.
FlaggedValue calc_d(const MomentState& h, Index d, const Observation& o,
                    double var_floor = kDefaultVarFloor);

/// E_j[D^d(P_j)^2] from the stored moments (closed form, O(1)). Since the
/// gradient is mean zero under P_j this is its variance. Requires
/// non-degenerate variances.
double gradient_second_moment(const MomentState& h, Index d);

/// CalcSigHat: sqrt(max{E_j D^2, sigma_floor_sq}); the floor alone (flagged)
/// when a variance is degenerate.
FlaggedValue calc_sig_hat(const MomentState& h, Index d, double sigma_floor_sq,
                          double var_floor = kDefaultVarFloor);

/// Exact second-order remainder Rem^d(P) of the expansion
///   Psi^d(P) - Psi^d(P0) = -E_{P0}[D^d(P)] + Rem^d(P).
/// Throws std::invalid_argument if p has a non-positive standard deviation.
double remainder(const PairSummary& p, const PairSummary& p0, int m);

}  // namespace maxcorr
