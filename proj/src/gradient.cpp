#include "maxcorr/gradient.hpp"

#include <cmath>
#include <stdexcept>

namespace maxcorr {
namespace {

constexpr double kBinom[5][5] = {{1, 0, 0, 0, 0},
                                 {1, 1, 0, 0, 0},
                                 {1, 2, 1, 0, 0},
                                 {1, 3, 3, 1, 0},
                                 {1, 4, 6, 4, 1}};

constexpr double sign_of(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }

// E_j[(X_k - mx)^a (Y - my)^b] through the binomial expansion of the raw
// moments. a + b <= 4.
double central(const MomentState& h, std::size_t k, int a, int b) {
  const double mx = h.mean_x(k);
  const double my = h.mean_y();
  double total = 0.0;
  for (int r = 0; r <= a; ++r) {
    for (int s = 0; s <= b; ++s) {
      total += sign_of(r + s + a + b) * kBinom[a][r] * kBinom[b][s] *
               h.raw(k, r, s) * std::pow(mx, a - r) * std::pow(my, b - s);
    }
  }
  return total;
}

}  // namespace

PairState pair_state(const MomentState& h, std::size_t k, double var_floor) {
  PairState out;
  const double vx = h.var_x(k);
  const double vy = h.var_y();
  out.summary.mean_x = h.mean_x(k);
  out.summary.mean_y = h.mean_y();
  out.degenerate = !(vx > var_floor) || !(vy > var_floor);
  if (!out.degenerate) {
    out.summary.sd_x = std::sqrt(vx);
    out.summary.sd_y = std::sqrt(vy);
    out.summary.corr = h.cov(k) / (out.summary.sd_x * out.summary.sd_y);
  }
  return out;
}

Index maximizer(const MomentState& h, double var_floor) {
  Index best{0, 1};
  double best_abs = -1.0;
  double best_corr = 0.0;
  for (std::size_t k = 0; k < h.dimension(); ++k) {
    const double c = correlation(h, k, var_floor);
    if (std::fabs(c) > best_abs) {
      best_abs = std::fabs(c);
      best_corr = c;
      best.k = k;
    }
  }
  best.m = best_corr < 0.0 ? -1 : 1;
  return best;
}

double gradient(const PairSummary& at, int m, double x_k, double y) {
  const double zx = (x_k - at.mean_x) / at.sd_x;
  const double zy = (y - at.mean_y) / at.sd_y;
  return m * (zx * zy - 0.5 * at.corr * (zx * zx + zy * zy));
}

FlaggedValue calc_d(const MomentState& h, Index d, const Observation& o,
                    double var_floor) {
  if (o.x.size() != h.dimension()) {
    throw std::invalid_argument("calc_d: observation dimension mismatch");
  }
  const PairState st = pair_state(h, d.k, var_floor);
  if (st.degenerate) return {0.0, true};
  return {gradient(st.summary, d.m, o.x[d.k], o.y), false};
}

double gradient_second_moment(const MomentState& h, Index d) {
  const std::size_t k = d.k;
  const double vx = h.var_x(k);
  const double vy = h.var_y();
  const double sx = std::sqrt(vx);
  const double sy = std::sqrt(vy);
  const double rho = h.cov(k) / (sx * sy);

  const double c22 = central(h, k, 2, 2);
  const double c40 = central(h, k, 4, 0);
  const double c04 = central(h, k, 0, 4);
  const double c31 = central(h, k, 3, 1);
  const double c13 = central(h, k, 1, 3);

  // m^2 = 1, so the sign of d drops out.
  return (2.0 + rho * rho) / (2.0 * vx * vy) * c22 +
         rho * rho / 4.0 * (c40 / (vx * vx) + c04 / (vy * vy)) -
         rho / (vx * sx * sy) * c31 - rho / (sx * vy * sy) * c13;
}

FlaggedValue calc_sig_hat(const MomentState& h, Index d, double sigma_floor_sq,
                          double var_floor) {
  if (!(sigma_floor_sq > 0.0)) {
    throw std::invalid_argument("calc_sig_hat: sigma_floor_sq must be positive");
  }
  if (!(h.var_x(d.k) > var_floor) || !(h.var_y() > var_floor)) {
    return {std::sqrt(sigma_floor_sq), true};
  }
  const double second = gradient_second_moment(h, d);
  return {std::sqrt(std::max(second, sigma_floor_sq)), false};
}

double remainder(const PairSummary& p, const PairSummary& p0, int m) {
  if (!(p.sd_x > 0.0) || !(p.sd_y > 0.0)) {
    throw std::invalid_argument("remainder: standard deviations of P must be positive");
  }
  const double sxy = p.sd_x * p.sd_y;
  const double dmx = p.mean_x - p0.mean_x;
  const double dmy = p.mean_y - p0.mean_y;
  const double vx = p.sd_x * p.sd_x;
  const double vy = p.sd_y * p.sd_y;
  const double cross = p.sd_x * p0.sd_y - p0.sd_x * p.sd_y;

  const double term_scale = (sxy - p0.sd_x * p0.sd_y) * (p.corr - p0.corr) / sxy;
  const double term_means = dmx * dmy / sxy;
  const double term_sq_means = -p.corr / 2.0 * (dmx * dmx / vx + dmy * dmy / vy);
  const double term_sd = -p.corr / (2.0 * vx * vy) * cross * cross;
  return m * (term_scale + term_means + term_sq_means + term_sd);
}

}  // namespace maxcorr
