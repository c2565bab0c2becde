#include "maxcorr/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace maxcorr {

void EstimatorAccumulator::accumulate(double plug_in, double gradient_at_next,
                                      double sigma_hat) {
  if (!std::isfinite(plug_in) || !std::isfinite(gradient_at_next) ||
      !std::isfinite(sigma_hat)) {
    throw std::invalid_argument("accumulate: non-finite input");
  }
  if (sigma_hat <= 0.0) {
    throw std::invalid_argument("accumulate: sigma_hat must be positive");
  }
  const double inv = 1.0 / sigma_hat;
  sum_weighted_ += (plug_in + gradient_at_next) * inv;
  sum_inv_sigma_ += inv;
  ++terms_;
}

CoreEstimate finalize(const EstimatorAccumulator& acc, double alpha) {
  if (acc.terms() == 0) {
    throw std::invalid_argument("finalize: no accumulated terms");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("finalize: alpha must lie in (0,1)");
  }
  const auto terms = static_cast<double>(acc.terms());
  CoreEstimate out;
  out.psi_hat = acc.sum_weighted() / acc.sum_inv_sigma();
  out.sigma_bar = terms / acc.sum_inv_sigma();
  const double half =
      normal_quantile(1.0 - alpha / 2.0) * out.sigma_bar / std::sqrt(terms);
  out.ci_lower = out.psi_hat - half;
  out.ci_upper = out.psi_hat + half;
  return out;
}

double step_weight(const EstimatorAccumulator& acc, double sigma_hat) {
  const double sigma_bar =
      static_cast<double>(acc.terms()) / acc.sum_inv_sigma();
  return sigma_bar / sigma_hat;
}

std::size_t compute_ell_n(std::size_t n, std::size_t p, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 2.0)) {
    throw std::invalid_argument("compute_ell_n: epsilon must lie in (0,2)");
  }
  if (n < 4) {
    throw std::invalid_argument("compute_ell_n: n must be at least 4, got " +
                                std::to_string(n));
  }
  if (p < 1) {
    throw std::invalid_argument("compute_ell_n: p must be at least 1");
  }
  const auto nd = static_cast<double>(n);
  const auto pd = static_cast<double>(p);
  const double log_branch =
      std::pow(std::log(std::max(nd, pd)), 1.0 + epsilon);
  double exp_branch = 0.0;
  if (p > 1) {
    const double beta_sq = std::log(pd) / std::sqrt(nd);
    // beta^(-2+eps) == (beta^2)^((-2+eps)/2)
    exp_branch = nd * std::exp(-std::pow(beta_sq, (epsilon - 2.0) / 2.0));
  }
  const double raw = std::ceil(std::max(log_branch, exp_branch));
  const double clamped = std::clamp(raw, 2.0, nd - 2.0);
  return static_cast<std::size_t>(clamped);
}

namespace {

// Wichura, "Algorithm AS 241: The Percentage Points of the Normal
// Distribution", Applied Statistics 37 (1988), PPND16.
double ppnd16(double q) {
  const double dq = q - 0.5;
  if (std::fabs(dq) <= 0.425) {
    const double r = 0.180625 - dq * dq;
    return dq *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = dq < 0.0 ? q : 1.0 - q;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return dq < 0.0 ? -val : val;
}

}  // namespace

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("normal_quantile: q must lie in (0,1)");
  }
  return ppnd16(q);
}

}  // namespace maxcorr
