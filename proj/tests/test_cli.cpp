#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tsam/config.hpp"
#include "tsam/csv.hpp"
#include "tsam/datasets.hpp"
#include "tsam/errors.hpp"

using namespace tsam;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tsam_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TSAM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallRun = R"({
  "seed": 5,
  "target": {"type": "banana", "mu": [0, 0, 0], "variances": [4, 1, 1]},
  "sampler": {"kernel": "TSAM", "n_iters": 2000, "thinning": 2},
  "experiment": {"type": "single-run"}
})";

}  // namespace

TEST_CASE("CSV parsing") {
  const auto t = parse_csv("a,b,c\r\n1,\"x,y\",\"he said \"\"hi\"\"\"\n\"multi\nline\",,3\r\n");
  REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x,y");
  CHECK(t.rows[0][2] == "he said \"hi\"");
  CHECK(t.rows[1][0] == "multi\nline");
  CHECK(t.rows[1][1].empty());
  CHECK(t.column("c") == 2);
  CHECK_THROWS_AS(t.column("d"), SchemaError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\n\"1,2\n"), ParseError);
  CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), IoError);
}

TEST_CASE("reals round-trip through text") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 2.0, -0.0}) {
    CHECK(parse_real(format_real(v)) == v);
  }
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(std::nan("")) == "nan");
  CHECK(std::isinf(parse_real(format_real(-INFINITY))));
  CHECK_THROWS_AS(parse_real("1.5x"), ValueError);
  CHECK_THROWS_AS(parse_real(""), ValueError);
}

TEST_CASE("writer quotes only when needed and uses CRLF") {
  const auto dir = scratch_dir("writer");
  CsvWriter w(dir / "w.csv");
  w.write_row({"plain", "with,comma", "with\"quote"});
  w.close();
  CHECK(slurp(dir / "w.csv") == "plain,\"with,comma\",\"with\"\"quote\"\r\n");
}

TEST_CASE("trace files round-trip exactly") {
  const auto dir = scratch_dir("trace");
  Trace tr;
  tr.dim = 2;
  RandomStream rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    TraceRow r;
    r.iter = 100 + i;
    r.x = Vector(2);
    r.x << rng.normal() * 1e-7, rng.normal() * 1e9;
    r.log_pi = -std::exp(rng.normal());
    r.stage1_accepted = i % 2 == 0;
    r.stage2_accepted = i % 3 == 0 && r.stage1_accepted;
    r.expensive_eval = r.stage1_accepted;
    tr.rows.push_back(r);
  }
  write_trace_csv(tr, dir / "t.csv");
  const auto back = read_trace_csv(dir / "t.csv");
  REQUIRE(back.size() == tr.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].iter == tr.rows[i].iter);
    CHECK(back[i].x == tr.rows[i].x);
    CHECK(back[i].log_pi == tr.rows[i].log_pi);
    CHECK(back[i].stage1_accepted == tr.rows[i].stage1_accepted);
    CHECK(back[i].stage2_accepted == tr.rows[i].stage2_accepted);
    CHECK(back[i].expensive_eval == tr.rows[i].expensive_eval);
  }
  CHECK(read_csv(dir / "t.csv").header ==
        std::vector<std::string>{"iter", "x_1", "x_2", "log_pi", "stage1_accept", "stage2_accept", "expensive_eval"});

  Trace empty;
  empty.dim = 3;
  write_trace_csv(empty, dir / "e.csv");
  CHECK(slurp(dir / "e.csv") == "iter,x_1,x_2,x_3,log_pi,stage1_accept,stage2_accept,expensive_eval\r\n");
  CHECK(read_trace_csv(dir / "e.csv").empty());
}

TEST_CASE("logistic design from a small table") {
  const auto t = parse_csv("y,color,size\n1,red,big\n0,blue,small\n0,red,small\n");
  LogisticSchema schema{"y", {{"color", true}, {"size", true}}};
  const auto data = logistic_from_table(t, schema);
  CHECK(data.X.rows() == 3);
  CHECK(data.X.cols() == 3);
  CHECK(data.column_names == std::vector<std::string>{"intercept", "color=red", "size=small"});
  Matrix expected(3, 3);
  expected << 1, 1, 0,  //
      1, 0, 1,          //
      1, 1, 1;
  CHECK(data.X == expected);
  CHECK(data.y == std::vector<std::uint8_t>{1, 0, 0});
  CHECK(data.n_zeros() == 2);

  // A numeric predictor collinear with a dummy makes the design deficient.
  const auto dup = parse_csv("y,color,z\n1,red,1\n0,blue,0\n0,red,1\n");
  CHECK_THROWS_AS(logistic_from_table(dup, {"y", {{"color", true}, {"z", false}}}), DataShapeError);
  CHECK_THROWS_AS(logistic_from_table(t, {"y", {{"shape", true}}}), SchemaError);
  CHECK_THROWS_AS(logistic_from_table(parse_csv("y,a\n2,x\n0,y\n"), {"y", {{"a", true}}}), ValueError);
}

TEST_CASE("bundled hare-lynx data") {
  const auto obs = load_lv_csv(fs::path(TSAM_DATA_DIR) / "hare_lynx.csv");
  CHECK(obs.size() == 21);
  CHECK(obs.times.front() == 1900.0);
  CHECK(obs.times.back() == 1920.0);
  for (const auto& c : obs.counts)
    for (double v : c) CHECK(v > 0.0);

  const auto dir = scratch_dir("lv");
  write_lv_csv(obs, dir / "copy.csv");
  const auto again = load_lv_csv(dir / "copy.csv");
  CHECK(again.times == obs.times);
  CHECK(again.counts == obs.counts);
  CHECK_THROWS_AS(observations_from_table(parse_csv("year,hare,lynx\n1900,0,3\n")), ValueError);
  CHECK_THROWS_AS(observations_from_table(parse_csv("year,hare\n1900,1\n")), SchemaError);
}

TEST_CASE("synthetic logistic data") {
  const std::size_t n = 41188;
  const double zf = 0.887;
  Vector beta(11);
  beta << 0, 0.4, -0.3, 0.6, -0.5, 0.3, 0.7, -0.4, 0.5, 0.9, -0.6;
  const auto g = generate_synthetic_logistic(n, zf, beta, 7);
  CHECK(g.data.n_rows() == n);
  CHECK(g.data.X.cols() == 11);
  CHECK(g.table.rows.size() == n);
  const double mean = zf * n;
  const double sd = std::sqrt(n * zf * (1.0 - zf));
  CHECK(std::abs(static_cast<double>(g.data.n_zeros()) - mean) < 5.0 * sd);

  const auto again = generate_synthetic_logistic(n, zf, beta, 7);
  CHECK(again.data.y == g.data.y);
  CHECK(again.data.X == g.data.X);

  // With β = 0 every row has the same probability, so the shift is its logit.
  const auto flat = generate_synthetic_logistic(2000, 0.75, Vector::Zero(11), 8);
  CHECK(flat.intercept_shift == doctest::Approx(std::log(0.25 / 0.75)).epsilon(1e-9));

  // The raw table rebuilds the same design.
  const auto rebuilt = logistic_from_table(g.table, g.schema);
  CHECK(rebuilt.X == g.data.X);
  CHECK_THROWS(generate_synthetic_logistic(n, zf, Vector::Zero(4), 7));
}

TEST_CASE("configuration defaults") {
  const auto cfg = parse_config(R"({"target": {"type": "shifted_t"}})", ".");
  CHECK(cfg.target->dim() == 8);
  CHECK(cfg.sampler.kernel == Kernel::TSAM);
  CHECK(cfg.sampler.n_iters == 10000);
  CHECK(cfg.sampler.burn_in_fraction == 0.5);
  CHECK(cfg.sampler.adaptation.t0 == 100);
  CHECK(cfg.sampler.adaptation.K == 1);
  CHECK(cfg.sampler.adaptation.s_d == doctest::Approx(2.4 * 2.4 / 8.0));
  CHECK(cfg.experiment.type == ExperimentType::SingleRun);
  CHECK(cfg.experiment.n_list == std::vector<std::int64_t>{500, 1000, 2000, 5000, 10000});
  CHECK(cfg.experiment.replicates == 20);
  CHECK(cfg.experiment.p == 0.683);
  CHECK(cfg.experiment.thinning_strategies == std::vector<std::int64_t>{1, 10, 20});

  const auto cmp = parse_config(R"({"target": {"type": "banana"}, "experiment": {"type": "edpm-compare"}})", ".");
  REQUIRE(cmp.experiment.kernels.size() == 2);
  CHECK(cmp.experiment.kernels[0].kernel == Kernel::TSAM);
  CHECK(cmp.experiment.kernels[1].kernel == Kernel::AM);
}

TEST_CASE("configuration errors") {
  auto violations = [](const std::string& text) {
    try {
      parse_config(text, ".");
    } catch (const ValidationError& e) {
      return e.violations();
    }
    return std::vector<std::string>{};
  };
  CHECK_FALSE(violations(R"({"target": {"type": "shifted_t"}, "sampler": {"n_iters": -5}})").empty());
  const auto v = violations(R"({"target": {"type": "shifted_t", "nuu": 3}, "sampler": {"thinning": 0}, "bogus": 1})");
  CHECK(v.size() == 3);
  CHECK_FALSE(violations(R"({"target": {"type": "shifted_t"}, "sampler": {"kernel": "XYZ"}})").empty());
  CHECK_FALSE(violations(R"({"target": {"type": "shifted_t"}, "experiment": {"type": "coverage"}})").empty());
  CHECK_FALSE(violations(R"({"target": {"type": "shifted_t", "mu": [0, 0]}})").empty());
  CHECK_FALSE(violations(R"({"target": {"type": "logistic", "data": {"csv": "/no/such.csv", "predictors": ["a"]}}})").empty());

  try {
    parse_config("{\n  \"target\": {\"type\": \"banana\"},\n  \"seed\": 1,,\n}", ".", "bad.json");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("bad.json:3:") == 0);
  }
}

TEST_CASE("effective configuration round-trips") {
  const auto dir = scratch_dir("effective");
  spit(dir / "lv.json", R"({"target": {"type": "lotka_volterra", "data": {"csv": ")" + std::string(TSAM_DATA_DIR) +
                            R"(/hare_lynx.csv"}}, "sampler": {"kernel": "AM", "adaptation": {"K": 5}},
                            "experiment": {"type": "edpm-compare", "kernels": ["TSAM", {"kernel": "AM", "thinning": 3}]}})");
  const std::vector<std::string> texts{
      kSmallRun,
      R"({"target": {"type": "shifted_t", "nu": 5}, "experiment": {"type": "mc-estimate", "n_list": [100, 200]}})",
      R"({"target": {"type": "logistic", "data": {"synthetic": {"n": 500}}, "subsample_size": 100}})",
  };
  for (const auto& text : texts) {
    const auto e1 = effective_config_json(parse_config(text, dir));
    CHECK(effective_config_json(parse_config(e1, dir)) == e1);
  }
  const auto lv = load_config(dir / "lv.json");
  CHECK(lv.experiment.kernels[1].thinning == 3);
  CHECK(lv.experiment.kernels[1].adaptation.K == 5);
  const auto e1 = effective_config_json(lv);
  CHECK(effective_config_json(parse_config(e1, dir)) == e1);
}

TEST_CASE("command line exit codes and determinism") {
  const auto dir = scratch_dir("cli");
  spit(dir / "ok.json", kSmallRun);
  CHECK(run_cli("run " + (dir / "ok.json").string() + " --out " + (dir / "a").string()) == 0);
  CHECK(run_cli("run " + (dir / "ok.json").string() + " --out " + (dir / "b").string()) == 0);
  CHECK(fs::exists(dir / "a" / "trace_TSAM.csv"));
  CHECK(fs::exists(dir / "a" / "effective_config.json"));
  CHECK(slurp(dir / "a" / "trace_TSAM.csv") == slurp(dir / "b" / "trace_TSAM.csv"));
  CHECK(read_trace_csv(dir / "a" / "trace_TSAM.csv").size() == 500);

  CHECK(run_cli("run " + (dir / "ok.json").string() + " --seed 6 --out " + (dir / "c").string()) == 0);
  CHECK(slurp(dir / "a" / "trace_TSAM.csv") != slurp(dir / "c" / "trace_TSAM.csv"));

  // The effective configuration reproduces the run.
  CHECK(run_cli("run " + (dir / "a" / "effective_config.json").string() + " --out " + (dir / "d").string()) == 0);
  CHECK(slurp(dir / "a" / "trace_TSAM.csv") == slurp(dir / "d" / "trace_TSAM.csv"));

  spit(dir / "bad.json", R"({"target": {"type": "banana"}, "sampler": {"n_iters": -1}})");
  CHECK(run_cli("run " + (dir / "bad.json").string()) == 2);
  spit(dir / "syntax.json", "{ not json");
  CHECK(run_cli("run " + (dir / "syntax.json").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run") == 2);

  spit(dir / "blocker", "a file where a directory should go");
  CHECK(run_cli("run " + (dir / "ok.json").string() + " --out " + (dir / "blocker" / "sub").string()) == 3);
}
