#pragma once

// Slow, independent reference computations used only by tests. Nothing here
// calls into the moment recursion or the closed-form variance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "maxcorr/estimator.hpp"
#include "maxcorr/moments.hpp"

namespace oracle {

using maxcorr::Observation;

inline double batch_moment(std::span<const Observation> rows, std::size_t k, int r,
                           int s) {
  double total = 0.0;
  for (const auto& o : rows) total += std::pow(o.x[k], r) * std::pow(o.y, s);
  return total / static_cast<double>(rows.size());
}

struct BatchPair {
  double mean_x = 0, mean_y = 0, var_x = 0, var_y = 0, cov = 0;
};

// Two-pass centered moments of (X_k, Y), population scaling.
inline BatchPair batch_pair(std::span<const Observation> rows, std::size_t k) {
  BatchPair b;
  const auto n = static_cast<double>(rows.size());
  for (const auto& o : rows) {
    b.mean_x += o.x[k];
    b.mean_y += o.y;
  }
  b.mean_x /= n;
  b.mean_y /= n;
  for (const auto& o : rows) {
    const double dx = o.x[k] - b.mean_x;
    const double dy = o.y - b.mean_y;
    b.var_x += dx * dx;
    b.var_y += dy * dy;
    b.cov += dx * dy;
  }
  b.var_x /= n;
  b.var_y /= n;
  b.cov /= n;
  return b;
}

inline bool degenerate(const BatchPair& b, double var_floor) {
  return !(b.var_x > var_floor) || !(b.var_y > var_floor);
}

inline double batch_corr(const BatchPair& b, double var_floor) {
  if (degenerate(b, var_floor)) return 0.0;
  return b.cov / std::sqrt(b.var_x * b.var_y);
}

// Gradient written out in covariance form rather than standardized form.
inline double gradient_cov_form(const BatchPair& b, int m, double x, double y) {
  const double sx = std::sqrt(b.var_x);
  const double sy = std::sqrt(b.var_y);
  const double rho = b.cov / (sx * sy);
  const double a = (x - b.mean_x) * (y - b.mean_y);
  const double bx = (x - b.mean_x) * (x - b.mean_x);
  const double by = (y - b.mean_y) * (y - b.mean_y);
  return m * (a * sy * sx / (b.var_x * b.var_y) -
              rho * (bx * b.var_y + by * b.var_x) / (2.0 * b.var_x * b.var_y));
}

// (1/j) sum_i [D(o_i) - mean D]^2 over the rows.
inline double brute_gradient_variance(std::span<const Observation> rows,
                                      std::size_t k, int m) {
  const BatchPair b = batch_pair(rows, k);
  std::vector<double> d;
  d.reserve(rows.size());
  for (const auto& o : rows) d.push_back(gradient_cov_form(b, m, o.x[k], o.y));
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(d.size());
}

struct ReferenceResult {
  double psi = 0, sigma_bar = 0, lower = 0, upper = 0, sum_weights = 0;
  std::size_t ell = 0;
};

// O(n^2 p) driver: at every refit recomputes all moments from the stored
// prefix, picks the maximizer by scanning batch correlations, and takes
// sigma_hat^2 as the brute-force variance of the gradient over the prefix.
inline ReferenceResult reference_est_psi(std::span<const Observation> rows, std::size_t ell,
                                         double alpha,
                                         std::optional<std::size_t> chunks = std::nullopt,
                                         double sigma_floor_sq = 1e-4,
                                         double var_floor = 1e-12) {
  const std::size_t n = rows.size();
  const std::size_t p = rows.front().x.size();
  const std::size_t steps = n - ell;
  const std::size_t nchunks = chunks ? std::min(*chunks, steps) : steps;
  const std::size_t base = steps / nchunks;

  std::vector<double> values;
  std::vector<double> sigmas;
  std::size_t j = ell;
  for (std::size_t c = 0; c < nchunks; ++c) {
    const std::size_t len = (c + 1 == nchunks) ? steps - base * (nchunks - 1) : base;
    const auto prefix = rows.subspan(0, j);
    std::size_t best_k = 0;
    double best_abs = -1, best_corr = 0;
    for (std::size_t k = 0; k < p; ++k) {
      const double r = batch_corr(batch_pair(prefix, k), var_floor);
      if (std::fabs(r) > best_abs) {
        best_abs = std::fabs(r);
        best_corr = r;
        best_k = k;
      }
    }
    const int m = best_corr < 0 ? -1 : 1;
    const BatchPair b = batch_pair(prefix, best_k);
    const bool degen = degenerate(b, var_floor);
    const double sigma =
        degen ? std::sqrt(sigma_floor_sq)
              : std::sqrt(std::max(brute_gradient_variance(prefix, best_k, m), sigma_floor_sq));
    for (std::size_t t = 0; t < len; ++t, ++j) {
      const auto& next = rows[j];
      const double g = degen ? 0.0 : gradient_cov_form(b, m, next.x[best_k], next.y);
      values.push_back(m * best_corr + g);
      sigmas.push_back(sigma);
    }
  }

  ReferenceResult out;
  out.ell = ell;
  double inv_sum = 0.0;
  for (double s : sigmas) inv_sum += 1.0 / s;
  out.sigma_bar = static_cast<double>(steps) / inv_sum;
  double weighted = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double w = out.sigma_bar / sigmas[i];
    out.sum_weights += w;
    weighted += w * values[i];
  }
  out.psi = weighted / static_cast<double>(steps);
  const double z = maxcorr::normal_quantile(1 - alpha / 2);
  const double half = z * out.sigma_bar / std::sqrt(static_cast<double>(steps));
  out.lower = out.psi - half;
  out.upper = out.psi + half;
  return out;
}

// A finitely supported distribution of (X, Y).
struct Discrete {
  std::vector<double> x, y, w;
};

inline Discrete random_discrete(std::mt19937_64& gen, std::size_t support) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.05, 1.0);
  Discrete d;
  double total = 0.0;
  for (std::size_t i = 0; i < support; ++i) {
    d.x.push_back(u(gen));
    d.y.push_back(u(gen));
    d.w.push_back(pos(gen));
    total += d.w.back();
  }
  for (double& w : d.w) w /= total;
  return d;
}

inline double expect(const Discrete& d, auto&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.w.size(); ++i) s += d.w[i] * f(d.x[i], d.y[i]);
  return s;
}

inline BatchPair exact_pair(const Discrete& d) {
  BatchPair b;
  b.mean_x = expect(d, [](double x, double) { return x; });
  b.mean_y = expect(d, [](double, double y) { return y; });
  b.var_x = expect(d, [&](double x, double) { return (x - b.mean_x) * (x - b.mean_x); });
  b.var_y = expect(d, [&](double, double y) { return (y - b.mean_y) * (y - b.mean_y); });
  b.cov = expect(d, [&](double x, double y) { return (x - b.mean_x) * (y - b.mean_y); });
  return b;
}

// Psi^d(P) - Psi^d(P0) + E_{P0}[D^d(P)], all by exhaustive summation.
inline double remainder_lhs(const Discrete& p, const Discrete& p0, int m) {
  const BatchPair bp = exact_pair(p);
  const BatchPair b0 = exact_pair(p0);
  const double psi_p = m * bp.cov / std::sqrt(bp.var_x * bp.var_y);
  const double psi_0 = m * b0.cov / std::sqrt(b0.var_x * b0.var_y);
  const double drift =
      expect(p0, [&](double x, double y) { return gradient_cov_form(bp, m, x, y); });
  return psi_p - psi_0 + drift;
}

inline std::vector<Observation> random_rows(std::mt19937_64& gen, std::size_t n,
                                            std::size_t p, double signal = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Observation> rows(n);
  for (auto& o : rows) {
    o.x.resize(p);
    for (double& v : o.x) v = u(gen);
    o.y = std::clamp(signal * o.x[0] + (1.0 - std::fabs(signal)) * u(gen), -1.0, 1.0);
  }
  return rows;
}

}  // namespace oracle
