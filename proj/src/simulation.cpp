#include "maxcorr/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "maxcorr/error.hpp"
#include "maxcorr/special.hpp"

namespace maxcorr {
namespace {

struct ModelName {
  Model model;
  std::string_view name;
};

constexpr std::array<ModelName, 8> kModelNames{{{Model::NIE, "N.IE"},
                                                {Model::A1IE, "A1.IE"},
                                                {Model::A2IE, "A2.IE"},
                                                {Model::NDE, "N.DE"},
                                                {Model::A1DE, "A1.DE"},
                                                {Model::A2DE, "A2.DE"},
                                                {Model::A3IE, "A3.IE"},
                                                {Model::A4IE, "A4.IE"}}};

bool heteroscedastic(Model model) {
  return model == Model::NDE || model == Model::A1DE || model == Model::A2DE;
}

double sum_range(std::span<const double> x, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t k = from; k < to; ++k) s += x[k];
  return s;
}

}  // namespace

std::string_view to_string(Model model) {
  for (const auto& entry : kModelNames) {
    if (entry.model == model) return entry.name;
  }
  return "?";
}

std::string_view to_string(Method method) {
  return method == Method::StabilizedOneStep ? "stabilized_one_step"
                                             : "bonferroni_t";
}

Model parse_model(std::string_view name) {
  for (const auto& entry : kModelNames) {
    if (entry.name == name) return entry.model;
  }
  throw InputError("unknown model '" + std::string(name) + "'");
}

Method parse_method(std::string_view name) {
  if (name == "stabilized_one_step") return Method::StabilizedOneStep;
  if (name == "bonferroni_t") return Method::BonferroniT;
  throw InputError("unknown method '" + std::string(name) + "'");
}

std::size_t support_size(Model model) {
  switch (model) {
    case Model::NIE:
    case Model::NDE:
      return 0;
    case Model::A1IE:
    case Model::A1DE:
    case Model::A3IE:
      return 1;
    case Model::A2IE:
    case Model::A2DE:
    case Model::A4IE:
      return 10;
  }
  return 0;
}

bool is_null(Model model) { return model == Model::NIE || model == Model::NDE; }

void ScenarioSpec::validate() const {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("rho must lie in [0,1)");
  }
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("alpha must lie in (0,0.5)");
  }
  if (n < 4) throw std::invalid_argument("n must be at least 4");
  if (p < 1) throw std::invalid_argument("p must be at least 1");
  if (p < support_size(model)) {
    throw std::invalid_argument("model " + std::string(to_string(model)) +
                                " needs p >= " +
                                std::to_string(support_size(model)));
  }
}

void gen_design_row(double rho, Rng& rng, std::span<double> out) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("gen_design_row: rho must lie in [0,1)");
  }
  const double shared = rho > 0.0 ? std::sqrt(rho) * rng.normal() : 0.0;
  const double own = std::sqrt(1.0 - rho);
  for (double& v : out) v = shared + own * rng.normal();
}

std::vector<double> gen_design_row(std::size_t p, double rho, Rng& rng) {
  std::vector<double> out(p);
  gen_design_row(rho, rng, out);
  return out;
}

double outcome_signal(Model model, std::span<const double> x) {
  if (x.size() < support_size(model)) {
    throw std::invalid_argument("model " + std::string(to_string(model)) +
                                " needs at least " +
                                std::to_string(support_size(model)) +
                                " predictors");
  }
  switch (model) {
    case Model::NIE:
    case Model::NDE:
      return 0.0;
    case Model::A1IE:
    case Model::A1DE:
      return x[0] / 5.0;
    case Model::A3IE:
      return x[0] / 15.0;
    case Model::A2IE:
    case Model::A2DE:
      return 0.15 * sum_range(x, 0, 5) - 0.1 * sum_range(x, 5, 10);
    case Model::A4IE:
      return 0.03 * sum_range(x, 0, 5) - 0.015 * sum_range(x, 5, 10);
  }
  return 0.0;
}

double outcome_noise(Model model, std::span<const double> x, Rng& rng) {
  if (!heteroscedastic(model)) return rng.normal();
  double eta = 0.0;
  for (double xk : x) eta += xk * rng.normal();
  return eta / std::sqrt(static_cast<double>(x.size()));
}

double gen_outcome(Model model, std::span<const double> x, Rng& rng) {
  const double signal = outcome_signal(model, x);
  return signal + outcome_noise(model, x, rng);
}

SimulatedSource::SimulatedSource(const ScenarioSpec& spec, Rng rng)
    : spec_(spec), rng_(rng) {
  spec_.validate();
}

bool SimulatedSource::next(Observation& out) {
  if (produced_ >= spec_.n) return false;
  out.x.resize(spec_.p);
  gen_design_row(spec_.rho, rng_, out.x);
  out.y = gen_outcome(spec_.model, out.x, rng_);
  ++produced_;
  return true;
}

CorrelationTTests::CorrelationTTests(std::size_t p)
    : mean_x_(p, 0.0), m2_x_(p, 0.0), c_xy_(p, 0.0) {}

void CorrelationTTests::add(const Observation& o) {
  if (o.x.size() != mean_x_.size()) {
    throw std::invalid_argument("CorrelationTTests: dimension mismatch");
  }
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  const double dy = o.y - mean_y_;
  mean_y_ += dy * inv;
  const double dy_new = o.y - mean_y_;
  m2_y_ += dy * dy_new;
  for (std::size_t k = 0; k < mean_x_.size(); ++k) {
    const double dx = o.x[k] - mean_x_[k];
    mean_x_[k] += dx * inv;
    m2_x_[k] += dx * (o.x[k] - mean_x_[k]);
    c_xy_[k] += dx * dy_new;
  }
}

double CorrelationTTests::correlation(std::size_t k) const {
  const double denom = m2_x_[k] * m2_y_;
  if (!(denom > 0.0)) return 0.0;
  return c_xy_[k] / std::sqrt(denom);
}

double CorrelationTTests::p_value(std::size_t k) const {
  const double scale_x = m2_x_[k] / static_cast<double>(count_);
  const double scale_y = m2_y_ / static_cast<double>(count_);
  if (!(scale_x > kDefaultVarFloor) || !(scale_y > kDefaultVarFloor)) {
    return 1.0;
  }
  const double r = correlation(k);
  const double one_minus = 1.0 - r * r;
  if (!(one_minus > 0.0)) return 0.0;
  const double df = static_cast<double>(count_) - 2.0;
  const double t = r * std::sqrt(df / one_minus);
  return student_t_two_sided_p(t, df);
}

bool CorrelationTTests::bonferroni_reject(double alpha) const {
  if (count_ < 3) {
    throw std::invalid_argument("bonferroni test needs at least 3 rows");
  }
  const double threshold = alpha / static_cast<double>(mean_x_.size());
  for (std::size_t k = 0; k < mean_x_.size(); ++k) {
    if (p_value(k) <= threshold) return true;
  }
  return false;
}

bool bonferroni_t_test(std::span<const Observation> rows, double alpha) {
  if (rows.size() < 3) {
    throw std::invalid_argument("bonferroni_t_test: need at least 3 rows");
  }
  CorrelationTTests tests(rows.front().x.size());
  for (const auto& row : rows) tests.add(row);
  return tests.bonferroni_reject(alpha);
}

bool run_replication(const ScenarioSpec& spec, std::size_t replication,
                     const StudyOptions& options) {
  SimulatedSource source(spec, Rng::substream(spec.seed, replication));
  if (spec.method == Method::BonferroniT) {
    CorrelationTTests tests(spec.p);
    Observation row;
    while (source.next(row)) tests.add(row);
    return tests.bonferroni_reject(spec.alpha);
  }
  ScreenConfig config;
  config.alpha = 2.0 * spec.alpha;
  config.chunk_count = options.chunk_count;
  return est_psi(source, spec.n, config).reject_null;
}

namespace {

std::string scenario_context(const ScenarioSpec& spec) {
  return "scenario " + std::string(to_string(spec.model)) +
         " n=" + std::to_string(spec.n) + " p=" + std::to_string(spec.p) +
         " rho=" + std::to_string(spec.rho) + " method=" +
         std::string(to_string(spec.method));
}

}  // namespace

std::vector<PowerRow> run_power_study(std::span<const ScenarioSpec> specs,
                                      const StudyOptions& options) {
  for (const auto& spec : specs) {
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(scenario_context(spec) + ": " + e.what());
    }
  }

  std::vector<PowerRow> rows;
  rows.reserve(specs.size());
  for (const auto& spec : specs) {
    std::vector<char> rejected(spec.reps, 0);
    const unsigned workers =
        std::max(1u, std::min<unsigned>(options.threads,
                                         static_cast<unsigned>(spec.reps)));
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
      try {
        for (std::size_t r = w; r < spec.reps; r += workers) {
          rejected[r] = run_replication(spec, r, options) ? 1 : 0;
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (const auto& err : errors) {
      if (!err) continue;
      try {
        std::rethrow_exception(err);
      } catch (const std::exception& e) {
        throw std::runtime_error(scenario_context(spec) + ": " + e.what());
      }
    }

    PowerRow row;
    row.spec = spec;
    for (char c : rejected) row.rejections += static_cast<std::size_t>(c);
    const auto reps = static_cast<double>(spec.reps);
    row.power = static_cast<double>(row.rejections) / reps;
    row.mc_stderr = std::sqrt(row.power * (1.0 - row.power) / reps);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace maxcorr
