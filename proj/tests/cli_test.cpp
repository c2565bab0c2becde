#include "maxcorr/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "maxcorr/csv.hpp"
#include "maxcorr/report.hpp"
#include "maxcorr/simulation.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kFixtures = MAXCORR_FIXTURE_DIR;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args, const std::string& stdin_text = "") {
  args.insert(args.begin(), "maxcorr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  CliRun r;
  r.code = maxcorr::run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "maxcorr-cli-test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<maxcorr::Observation> load(const fs::path& path) {
  std::ifstream in(path);
  maxcorr::CsvObservationReader reader(in);
  std::vector<maxcorr::Observation> rows;
  maxcorr::Observation o;
  while (reader.next(o)) rows.push_back(o);
  return rows;
}

TEST(CliScreen, PerfectCorrelationFixture) {
  const auto r = run({"screen", "--input", (kFixtures / "perfect_x2.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["schema"], "screen-result/1");
  EXPECT_NEAR(j["psi_hat"].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(j["reject_null"].get<bool>());
  EXPECT_EQ(j["selected"]["k"], 2);
  EXPECT_EQ(j["selected"]["column"], "x2");
  EXPECT_EQ(j["selected"]["sign"], 1);
  EXPECT_EQ(j["n"], 120);
  EXPECT_EQ(j["p"], 3);
}

TEST(CliScreen, GoldenNullFixture) {
  const auto r = run({"screen", "--input", (kFixtures / "null_n300_p20.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(kFixtures / "null_n300_p20.golden.json"));

  // The frozen numbers also agree with the quadratic-time reference.
  const auto j = json::parse(r.out);
  const auto rows = load(kFixtures / "null_n300_p20.csv");
  const auto ref = oracle::reference_est_psi(rows, j["ell_n"].get<std::size_t>(), 0.05);
  EXPECT_EQ(j["ell_n"].get<std::size_t>(), maxcorr::compute_ell_n(300, 20, 0.5));
  EXPECT_NEAR(j["psi_hat"].get<double>(), ref.psi, 1e-10);
  EXPECT_NEAR(j["sigma_bar"].get<double>(), ref.sigma_bar, 1e-10);
  EXPECT_NEAR(j["ci_lower"].get<double>(), ref.lower, 1e-10);
  EXPECT_NEAR(j["ci_upper"].get<double>(), ref.upper, 1e-10);
  EXPECT_FALSE(j["reject_null"].get<bool>());
  EXPECT_EQ(j["top_correlations"].size(), 10u);
}

TEST(CliScreen, StandardInputMatchesFile) {
  const auto path = kFixtures / "null_n300_p20.csv";
  const auto from_file = run({"screen", "--input", path.string(), "--format", "csv"});
  const auto from_stdin = run({"screen", "--format", "csv"}, slurp(path));
  ASSERT_EQ(from_file.code, 0);
  ASSERT_EQ(from_stdin.code, 0) << from_stdin.err;
  EXPECT_EQ(from_file.out, from_stdin.out);
  EXPECT_EQ(from_file.out.rfind("psi_hat,", 0), 0u);
}

TEST(CliScreen, OptionsReachTheEstimator) {
  const auto path = (kFixtures / "null_n300_p20.csv").string();
  const auto r = run({"screen", "--input", path, "--alpha", "0.1", "--ell", "40",
                      "--chunks", "5", "--y-col", "x20", "--sigmoid"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["ell_n"], 40);
  EXPECT_EQ(j["alpha"], 0.1);
  EXPECT_EQ(j["p"], 20);

  auto rows = load(path);
  for (auto& o : rows) {
    std::swap(o.y, o.x[19]);
    for (double& v : o.x) v = maxcorr::sigmoid_transform(v);
    o.y = maxcorr::sigmoid_transform(o.y);
  }
  const auto ref = oracle::reference_est_psi(rows, 40, 0.1, std::size_t{5});
  EXPECT_NEAR(j["psi_hat"].get<double>(), ref.psi, 1e-10);
  EXPECT_NEAR(j["ci_lower"].get<double>(), ref.lower, 1e-10);
}

TEST(CliScreen, RangeWarningOnlyWithoutSigmoid) {
  const auto path = (kFixtures / "null_n300_p20.csv").string();
  const auto plain = run({"screen", "--input", path});
  EXPECT_NE(plain.err.find("outside [-1, 1]"), std::string::npos);
  const auto mapped = run({"screen", "--input", path, "--sigmoid"});
  EXPECT_TRUE(mapped.err.empty()) << mapped.err;
}

TEST(CliScreen, MissingFileIsInputError) {
  const auto r = run({"screen", "--input", "/nonexistent/data.csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/nonexistent/data.csv"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(CliScreen, BadCellIsInputError) {
  const auto path = scratch("bad_cell.csv");
  {
    std::ofstream out(path);
    out << "x1,x2,x3,y\n";
    for (int r = 1; r <= 20; ++r) out << "0.1," << 0.01 * r << "," << (r == 17 ? "NA" : "0.2") << ",0.3\n";
  }
  const auto r = run({"screen", "--input", path.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("row 17"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("x3"), std::string::npos) << r.err;
}

TEST(CliScreen, TooFewRowsAndBadOptions) {
  EXPECT_EQ(run({"screen"}, "x,y\n1,2\n3,4\n").code, 2);
  EXPECT_EQ(run({"screen", "--alpha", "2"}, "").code, 2);
  EXPECT_EQ(run({"screen", "--format", "xml"}, "").code, 2);
  EXPECT_EQ(run({}).code, 2);
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("simulate"), std::string::npos);
}

TEST(CliSimulate, WritesReproduciblePowerTable) {
  const auto out_a = scratch("power_a.csv");
  const auto out_b = scratch("power_b.csv");
  const auto grid = (kFixtures / "grid_small.csv").string();
  ASSERT_EQ(run({"simulate", "--grid", grid, "--out", out_a.string(), "--reps", "10"}).code, 0);
  ASSERT_EQ(run({"simulate", "--grid", grid, "--out", out_b.string(), "--reps", "10",
                 "--threads", "2"}).code, 0);
  const auto text = slurp(out_a);
  EXPECT_EQ(text, slurp(out_b));
  std::istringstream lines(text);
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, maxcorr::kPowerCsvHeader);
  std::size_t count = 0;
  while (std::getline(lines, row)) {
    ++count;
    EXPECT_NE(row.find(",10,"), std::string::npos) << row;
  }
  EXPECT_EQ(count, 2u);
}

TEST(CliSimulate, JsonByExtension) {
  const auto out = scratch("power.json");
  const auto grid = (kFixtures / "grid_small.csv").string();
  ASSERT_EQ(run({"simulate", "--grid", grid, "--out", out.string(), "--reps", "4",
                 "--seed", "3", "--chunks", "0"}).code, 0);
  const auto j = json::parse(slurp(out));
  EXPECT_EQ(j["schema"], "power-table/1");
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["reps"], 4);
  EXPECT_EQ(j["rows"][0]["seed"], 3);
}

TEST(CliSimulate, BadGridNamesLine) {
  const auto grid = scratch("bad_grid.csv");
  {
    std::ofstream out(grid);
    out << "model,n,p,rho,method\nN.IE,100,10,0,stabilized_one_step\nZ.IE,100,10,0,bonferroni_t\n";
  }
  const auto r = run({"simulate", "--grid", grid.string(), "--out", scratch("x.csv").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

  const auto missing = run({"simulate", "--grid", "/nonexistent/grid.csv", "--out", "x.csv"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("/nonexistent/grid.csv"), std::string::npos);
}

TEST(CliRoundTrip, SimulatedCsvMatchesInMemory) {
  maxcorr::ScenarioSpec spec;
  spec.model = maxcorr::Model::A2IE;
  spec.n = 400;
  spec.p = 25;
  spec.seed = 11;
  std::vector<maxcorr::Observation> rows(spec.n);
  maxcorr::SimulatedSource src(spec, maxcorr::Rng::substream(spec.seed, 0));
  for (auto& o : rows) ASSERT_TRUE(src.next(o));

  const auto path = scratch("roundtrip.csv");
  {
    std::ofstream out(path);
    for (std::size_t k = 0; k < spec.p; ++k) out << "x" << k + 1 << ',';
    out << "y\n";
    for (const auto& o : rows) {
      for (double v : o.x) out << maxcorr::format_double(v) << ',';
      out << maxcorr::format_double(o.y) << '\n';
    }
  }
  maxcorr::VectorSource mem(rows);
  const auto direct = maxcorr::est_psi(mem, rows.size(), {});
  const auto r = run({"screen", "--input", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["psi_hat"].get<double>(), direct.psi_hat, 1e-12);
  EXPECT_NEAR(j["ci_lower"].get<double>(), direct.ci_lower, 1e-12);
  EXPECT_NEAR(j["ci_upper"].get<double>(), direct.ci_upper, 1e-12);
}

TEST(CliBinary, ExitCodes) {
  const std::string cli = MAXCORR_CLI_PATH;
  const auto ok = std::system((cli + " screen --input " + (kFixtures / "perfect_x2.csv").string() +
                               " > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  const auto bad = std::system((cli + " screen --input /nonexistent.csv 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(bad), 2);
}

}  // namespace
