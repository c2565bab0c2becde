#pragma once

#include <cstddef>
#include <cstdint>

namespace maxcorr {

/// Running sums of the stabilized one-step estimator.
///
/// Each step j contributes a bias-corrected plug-in value v_j and a
/// standard-deviation estimate s_j. The estimator is the inverse-s weighted
/// mean of the v_j, so two running sums are enough to finalize it:
///   psi       = sum_weighted / sum_inv_sigma
///   sigma_bar = terms / sum_inv_sigma       (harmonic mean of the s_j)
/// With weights w_j = sigma_bar / s_j this is (1/terms) * sum_j w_j v_j and
/// the weights sum to terms.
class EstimatorAccumulator {
 public:
  /// Adds one step. sigma_hat must already be floored (strictly positive).
  /// Throws std::invalid_argument on non-finite input or sigma_hat <= 0.
  void accumulate(double plug_in, double gradient_at_next, double sigma_hat);

  void reset() { *this = EstimatorAccumulator{}; }

  double sum_weighted() const { return sum_weighted_; }
  double sum_inv_sigma() const { return sum_inv_sigma_; }
  std::size_t terms() const { return terms_; }

 private:
  double sum_weighted_ = 0.0;
  double sum_inv_sigma_ = 0.0;
  std::size_t terms_ = 0;
};

/// Point estimate and Wald-type interval produced from an accumulator.
struct CoreEstimate {
  double psi_hat = 0.0;
  double sigma_bar = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

/// psi +/- z_{1-alpha/2} * sigma_bar / sqrt(terms).
/// Throws std::invalid_argument if acc has no terms or alpha is not in (0,1).
CoreEstimate finalize(const EstimatorAccumulator& acc, double alpha);

/// Weight of a step with standard deviation sigma_hat: sigma_bar / sigma_hat.
double step_weight(const EstimatorAccumulator& acc, double sigma_hat);

/// Burn-in length:
///   ceil(max{ log(max(n,p))^(1+eps), n * exp(-beta^(-2+eps)) }),
/// beta^2 = log(p)/sqrt(n), clamped to [2, n-2]. For p = 1 the second
/// branch is 0.
std::size_t compute_ell_n(std::size_t n, std::size_t p, double epsilon);

/// Inverse standard normal CDF (Wichura's AS 241, ~1e-16 relative).
double normal_quantile(double q);

}  // namespace maxcorr
