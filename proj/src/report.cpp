#include "maxcorr/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "maxcorr/csv.hpp"
#include "maxcorr/error.hpp"

namespace maxcorr {

std::vector<RankedPredictor> top_correlations(const MomentState& h,
                                              std::size_t count,
                                              double var_floor) {
  const CorrelationSummary summary = correlations(h, var_floor);
  std::vector<std::size_t> order(summary.corr.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(count, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    const double fa = std::fabs(summary.corr[a]);
    const double fb = std::fabs(summary.corr[b]);
    return fa != fb ? fa > fb : a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(keep),
                    order.end(), better);
  std::vector<RankedPredictor> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    out.push_back({order[i], summary.corr[order[i]]});
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string name_of(const ScreenReport& report, std::size_t k) {
  return k < report.predictor_names.size() ? report.predictor_names[k]
                                           : "x" + std::to_string(k + 1);
}

}  // namespace

nlohmann::ordered_json to_json(const ScreenReport& report) {
  const ScreenResult& r = report.result;
  nlohmann::ordered_json j;
  j["schema"] = kScreenResultSchema;
  j["psi_hat"] = r.psi_hat;
  j["sigma_bar"] = r.sigma_bar;
  j["ci_lower"] = r.ci_lower;
  j["ci_upper"] = r.ci_upper;
  j["alpha"] = r.alpha;
  j["n"] = r.n;
  j["p"] = r.p;
  j["ell_n"] = r.ell_n;
  j["reject_null"] = r.reject_null;
  j["selected"] = {{"k", r.final_index.k + 1},
                   {"column", name_of(report, r.final_index.k)},
                   {"sign", r.final_index.m}};
  auto top = nlohmann::ordered_json::array();
  for (const auto& t : report.top) {
    top.push_back({{"k", t.k + 1}, {"column", name_of(report, t.k)}, {"corr", t.corr}});
  }
  j["top_correlations"] = std::move(top);
  j["degenerate_steps"] = r.degenerate_steps;
  return j;
}

std::string to_csv(const ScreenReport& report) {
  const ScreenResult& r = report.result;
  std::ostringstream out;
  out << "psi_hat,sigma_bar,ci_lower,ci_upper,alpha,n,p,ell_n,reject_null,"
         "selected_k,selected_column,selected_sign,degenerate_steps\n";
  out << format_double(r.psi_hat) << ',' << format_double(r.sigma_bar) << ','
      << format_double(r.ci_lower) << ',' << format_double(r.ci_upper) << ','
      << format_double(r.alpha) << ',' << r.n << ',' << r.p << ',' << r.ell_n
      << ',' << (r.reject_null ? "true" : "false") << ','
      << r.final_index.k + 1 << ',' << name_of(report, r.final_index.k) << ','
      << r.final_index.m << ',' << r.degenerate_steps << '\n';
  return out.str();
}

void write_power_csv(std::ostream& out, std::span<const PowerRow> rows) {
  out << kPowerCsvHeader << '\n';
  for (const auto& row : rows) {
    out << to_string(row.spec.model) << ',' << row.spec.n << ',' << row.spec.p
        << ',' << format_double(row.spec.rho) << ','
        << to_string(row.spec.method) << ',' << row.spec.reps << ','
        << row.rejections << ',' << format_double(row.power) << ','
        << format_double(row.mc_stderr) << '\n';
  }
}

nlohmann::ordered_json power_to_json(std::span<const PowerRow> rows) {
  nlohmann::ordered_json j;
  j["schema"] = kPowerTableSchema;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    arr.push_back({{"model", to_string(row.spec.model)},
                   {"n", row.spec.n},
                   {"p", row.spec.p},
                   {"rho", row.spec.rho},
                   {"method", to_string(row.spec.method)},
                   {"reps", row.spec.reps},
                   {"alpha", row.spec.alpha},
                   {"seed", row.spec.seed},
                   {"rejections", row.rejections},
                   {"power", row.power},
                   {"mc_stderr", row.mc_stderr}});
  }
  j["rows"] = std::move(arr);
  return j;
}

namespace {

template <class T>
T parse_unsigned(const std::string& cell, const std::string& what,
                 std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
    throw InputError("grid line " + std::to_string(line) + ": invalid " + what +
                     " '" + cell + "'");
  }
  return value;
}

double parse_real(const std::string& cell, const std::string& what,
                  std::size_t line) {
  const auto v = parse_number(cell);
  if (!v) {
    throw InputError("grid line " + std::to_string(line) + ": invalid " + what +
                     " '" + cell + "'");
  }
  return *v;
}

}  // namespace

std::vector<ScenarioSpec> parse_grid(std::istream& in, const GridDefaults& defaults) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("grid file is empty");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    static const char* known[] = {"model", "n", "p", "rho", "method", "reps", "alpha", "seed"};
    if (std::find(std::begin(known), std::end(known), header[i]) == std::end(known)) {
      throw InputError("grid line 1: unknown column '" + header[i] + "'");
    }
    col[header[i]] = i;
  }
  for (const char* required : {"model", "n", "p", "rho", "method"}) {
    if (!col.count(required)) {
      throw InputError(std::string("grid line 1: missing column '") + required + "'");
    }
  }

  std::vector<ScenarioSpec> specs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError("grid line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    }
    ScenarioSpec spec;
    try {
      spec.model = parse_model(cells[col["model"]]);
      spec.method = parse_method(cells[col["method"]]);
    } catch (const InputError& e) {
      throw InputError("grid line " + std::to_string(line_no) + ": " + e.what());
    }
    spec.n = parse_unsigned<std::size_t>(cells[col["n"]], "n", line_no);
    spec.p = parse_unsigned<std::size_t>(cells[col["p"]], "p", line_no);
    spec.rho = parse_real(cells[col["rho"]], "rho", line_no);
    spec.reps = col.count("reps")
                    ? parse_unsigned<std::size_t>(cells[col["reps"]], "reps", line_no)
                    : defaults.reps;
    spec.alpha = col.count("alpha") ? parse_real(cells[col["alpha"]], "alpha", line_no)
                                    : defaults.alpha;
    spec.seed = col.count("seed")
                    ? parse_unsigned<std::uint64_t>(cells[col["seed"]], "seed", line_no)
                    : defaults.seed;
    if (defaults.reps_override) spec.reps = *defaults.reps_override;
    if (defaults.seed_override) spec.seed = *defaults.seed_override;
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError("grid line " + std::to_string(line_no) + ": " + e.what());
    }
    specs.push_back(spec);
  }
  if (specs.empty()) throw InputError("grid file lists no scenarios");
  return specs;
}

}  // namespace maxcorr
