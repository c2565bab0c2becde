#include "maxcorr/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace maxcorr {
namespace {

void check_finite(const Observation& o) {
  if (!std::isfinite(o.y)) {
    throw std::invalid_argument("observation: non-finite outcome");
  }
  for (std::size_t k = 0; k < o.x.size(); ++k) {
    if (!std::isfinite(o.x[k])) {
      throw std::invalid_argument("observation: non-finite predictor at index " +
                                  std::to_string(k));
    }
  }
}

// Fills the ten per-predictor monomials of (x, y) in storage order.
inline void monomials(double x, double y, double y2, double y3, double* out) {
  const double x2 = x * x;
  const double x3 = x2 * x;
  out[0] = x;
  out[1] = x2;
  out[2] = x3;
  out[3] = x2 * x2;
  out[4] = x * y;
  out[5] = x * y2;
  out[6] = x * y3;
  out[7] = x2 * y;
  out[8] = x2 * y2;
  out[9] = x3 * y;
}

// Storage slot of x^r y^s for r >= 1.
constexpr int slot_of(int r, int s) {
  constexpr int table[5][4] = {
      {-1, -1, -1, -1}, {0, 4, 5, 6}, {1, 7, 8, -1}, {2, 9, -1, -1}, {3, -1, -1, -1}};
  return table[r][s];
}

}  // namespace

MomentState MomentState::initialize(const Observation& first,
                                    const Observation& second) {
  if (first.x.size() != second.x.size()) {
    throw std::invalid_argument("initialize_h: dimension mismatch (" +
                                std::to_string(first.x.size()) + " vs " +
                                std::to_string(second.x.size()) + ")");
  }
  if (first.x.empty()) {
    throw std::invalid_argument("initialize_h: observations have no predictors");
  }
  check_finite(first);
  check_finite(second);

  MomentState h;
  h.count_ = 2;
  h.dimension_ = first.x.size();
  h.moments_.resize(h.dimension_ * kSlotsPerPredictor);

  const double a = first.y;
  const double b = second.y;
  h.y_ = {(a + b) / 2, (a * a + b * b) / 2, (a * a * a + b * b * b) / 2,
          (a * a * a * a + b * b * b * b) / 2};

  double m1[kSlotsPerPredictor];
  double m2[kSlotsPerPredictor];
  for (std::size_t k = 0; k < h.dimension_; ++k) {
    monomials(first.x[k], a, a * a, a * a * a, m1);
    monomials(second.x[k], b, b * b, b * b * b, m2);
    double* dst = h.moments_.data() + k * kSlotsPerPredictor;
    for (std::size_t s = 0; s < kSlotsPerPredictor; ++s) {
      dst[s] = (m1[s] + m2[s]) / 2;
    }
  }
  return h;
}

void MomentState::update(const Observation& o) {
  if (o.x.size() != dimension_) {
    throw std::invalid_argument("update_h: dimension mismatch (expected " +
                                std::to_string(dimension_) + ", got " +
                                std::to_string(o.x.size()) + ")");
  }
  check_finite(o);

  const double inv = 1.0 / static_cast<double>(count_ + 1);
  const double y = o.y;
  const double y2 = y * y;
  const double y3 = y2 * y;
  const double y4 = y2 * y2;
  y_[0] += (y - y_[0]) * inv;
  y_[1] += (y2 - y_[1]) * inv;
  y_[2] += (y3 - y_[2]) * inv;
  y_[3] += (y4 - y_[3]) * inv;

  double* m = moments_.data();
  const double* x = o.x.data();
  double f[kSlotsPerPredictor];
  for (std::size_t k = 0; k < dimension_; ++k, m += kSlotsPerPredictor) {
    monomials(x[k], y, y2, y3, f);
    for (std::size_t s = 0; s < kSlotsPerPredictor; ++s) {
      m[s] += (f[s] - m[s]) * inv;
    }
  }
  ++count_;
}

double MomentState::raw(std::size_t k, int r, int s) const {
  if (r < 0 || s < 0 || r + s > 4) {
    throw std::out_of_range("MomentState::raw: need r, s >= 0 and r + s <= 4");
  }
  if (r == 0) return s == 0 ? 1.0 : y_[static_cast<std::size_t>(s - 1)];
  if (k >= dimension_) {
    throw std::out_of_range("MomentState::raw: predictor index out of range");
  }
  return slots(k)[slot_of(r, s)];
}

double MomentState::var_x(std::size_t k) const {
  const double* m = slots(k);
  return m[1] - m[0] * m[0];
}

double MomentState::var_y() const { return y_[1] - y_[0] * y_[0]; }

double MomentState::cov(std::size_t k) const {
  const double* m = slots(k);
  return m[4] - m[0] * y_[0];
}

double correlation(const MomentState& h, std::size_t k, double var_floor) {
  const double vx = h.var_x(k);
  const double vy = h.var_y();
  if (!(vx > var_floor) || !(vy > var_floor)) return 0.0;
  return h.cov(k) / std::sqrt(vx * vy);
}

CorrelationSummary correlations(const MomentState& h, double var_floor) {
  CorrelationSummary out;
  const std::size_t p = h.dimension();
  out.corr.resize(p);
  out.var_x.resize(p);
  out.var_y = h.var_y();
  for (std::size_t k = 0; k < p; ++k) {
    out.var_x[k] = h.var_x(k);
    out.corr[k] = correlation(h, k, var_floor);
  }
  return out;
}

}  // namespace maxcorr
