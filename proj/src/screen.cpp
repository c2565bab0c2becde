#include "maxcorr/screen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "maxcorr/error.hpp"

namespace maxcorr {

void ScreenConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1)");
  }
  if (!(epsilon > 0.0 && epsilon < 2.0)) {
    throw std::invalid_argument("epsilon must lie in (0,2)");
  }
  if (!(sigma_floor_sq > 0.0)) {
    throw std::invalid_argument("sigma_floor_sq must be positive");
  }
  if (!(var_floor >= 0.0)) {
    throw std::invalid_argument("var_floor must be non-negative");
  }
  if (chunk_count && *chunk_count < 1) {
    throw std::invalid_argument("chunk count must be at least 1");
  }
}

bool VectorSource::next(Observation& out) {
  if (pos_ >= rows_.size()) return false;
  const Observation& row = rows_[pos_++];
  out.x.assign(row.x.begin(), row.x.end());
  out.y = row.y;
  return true;
}

double sigmoid_transform(double z) { return 2.0 / (1.0 + std::exp(-z)) - 1.0; }

double StepSnapshot::gradient_at(const Observation& o) const {
  if (degenerate) return 0.0;
  return gradient(at, index.m, o.x[index.k], o.y);
}

StepSnapshot freeze_step(const MomentState& h, const ScreenConfig& config) {
  StepSnapshot snap;
  snap.index = maximizer(h, config.var_floor);
  const PairState st = pair_state(h, snap.index.k, config.var_floor);
  snap.at = st.summary;
  snap.degenerate = st.degenerate;
  snap.plug_in = snap.index.m * st.summary.corr;
  snap.sigma_hat =
      calc_sig_hat(h, snap.index, config.sigma_floor_sq, config.var_floor).value;
  return snap;
}

ChunkPlan ChunkPlan::make(std::size_t steps,
                          std::optional<std::size_t> chunk_count) {
  ChunkPlan plan;
  plan.steps = steps;
  if (steps == 0) return plan;
  plan.chunks = chunk_count ? std::min(*chunk_count, steps) : steps;
  if (plan.chunks == 0) {
    throw std::invalid_argument("chunk count must be at least 1");
  }
  plan.base = steps / plan.chunks;
  return plan;
}

namespace {

class Reader {
 public:
  Reader(ObservationSource& stream, std::size_t n, bool sigmoid)
      : stream_(stream), n_(n), sigmoid_(sigmoid) {}

  // Reads observation number `read_ + 1` into buf.
  void read(Observation& buf) {
    if (!stream_.next(buf)) {
      throw InputError("stream ended after " + std::to_string(read_) +
                       " observations, expected " + std::to_string(n_));
    }
    ++read_;
    if (p_ == 0) {
      p_ = buf.x.size();
    } else if (buf.x.size() != p_) {
      throw InputError("observation " + std::to_string(read_) + " has " +
                       std::to_string(buf.x.size()) + " predictors, expected " +
                       std::to_string(p_));
    }
    if (sigmoid_) {
      for (double& v : buf.x) v = sigmoid_transform(v);
      buf.y = sigmoid_transform(buf.y);
    }
  }

 private:
  ObservationSource& stream_;
  std::size_t n_;
  bool sigmoid_;
  std::size_t read_ = 0;
  std::size_t p_ = 0;
};

}  // namespace

namespace detail {

ScreenResult est_psi_impl(ObservationSource& stream, std::size_t n,
                          const ScreenConfig& config, MomentState& state) {
  config.validate();
  if (n < 4) {
    throw std::invalid_argument("est_psi: n must be at least 4, got " +
                                std::to_string(n));
  }

  Reader reader(stream, n, config.apply_sigmoid);
  Observation first;
  Observation buf;
  reader.read(first);
  reader.read(buf);
  if (first.x.empty()) throw InputError("observations have no predictors");
  state = MomentState::initialize(first, buf);
  const std::size_t p = state.dimension();

  std::size_t ell = 0;
  if (config.ell_override) {
    ell = *config.ell_override;
    if (ell < 2 || ell > n - 1) {
      throw std::invalid_argument("ell override must lie in [2, n-1], got " +
                                  std::to_string(ell));
    }
  } else {
    ell = compute_ell_n(n, p, config.epsilon);
  }

  // Burn-in: O_3..O_ell only feed the moment state.
  for (std::size_t i = 3; i <= ell; ++i) {
    reader.read(buf);
    state.update(buf);
  }

  ScreenResult result;
  EstimatorAccumulator acc;
  const ChunkPlan plan = ChunkPlan::make(n - ell, config.chunk_count);
  for (std::size_t c = 0; c < plan.chunks; ++c) {
    const StepSnapshot snap = freeze_step(state, config);
    const std::size_t len = plan.size(c);
    for (std::size_t t = 0; t < len; ++t) {
      reader.read(buf);
      acc.accumulate(snap.plug_in, snap.gradient_at(buf), snap.sigma_hat);
      if (snap.degenerate) ++result.degenerate_steps;
      state.update(buf);
    }
  }

  const CoreEstimate core = finalize(acc, config.alpha);
  result.psi_hat = core.psi_hat;
  result.sigma_bar = core.sigma_bar;
  result.ci_lower = core.ci_lower;
  result.ci_upper = core.ci_upper;
  result.alpha = config.alpha;
  result.n = n;
  result.ell_n = ell;
  result.reject_null = core.ci_lower > 0.0;
  result.p = p;
  result.final_index = maximizer(state, config.var_floor);
  result.sum_weights = acc.sum_inv_sigma() * core.sigma_bar;
  return result;
}

}  // namespace detail

ScreenResult est_psi(ObservationSource& stream, std::size_t n,
                     const ScreenConfig& config) {
  MomentState state;
  return detail::est_psi_impl(stream, n, config, state);
}

}  // namespace maxcorr
