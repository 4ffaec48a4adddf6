#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bnrad/cli.hpp"
#include "bnrad/errors.hpp"
#include "doctest.h"

using namespace bnrad;
using namespace bnrad::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bnrad_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Subset of JSON Schema used by the files in schemas/.
void validate(const json& v, const json& s, const std::string& where, std::vector<std::string>& errs) {
  if (s.contains("type")) {
    const std::string t = s["type"];
    bool ok = (t == "object" && v.is_object()) || (t == "array" && v.is_array()) ||
              (t == "string" && v.is_string()) || (t == "boolean" && v.is_boolean()) ||
              (t == "integer" && v.is_number_integer()) || (t == "number" && v.is_number());
    if (!ok) {
      errs.push_back(where + ": expected " + t);
      return;
    }
  }
  if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end()) {
    errs.push_back(where + ": not in enum");
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>()) errs.push_back(where + ": below minimum");
    if (s.contains("maximum") && x > s["maximum"].get<double>()) errs.push_back(where + ": above maximum");
    if (s.contains("exclusiveMinimum") && !(x > s["exclusiveMinimum"].get<double>())) {
      errs.push_back(where + ": not above exclusiveMinimum");
    }
  }
  if (v.is_object()) {
    for (const auto& r : s.value("required", json::array())) {
      if (!v.contains(r.get<std::string>())) errs.push_back(where + ": missing " + r.get<std::string>());
    }
    const auto props = s.value("properties", json::object());
    for (const auto& [k, item] : v.items()) {
      if (props.contains(k)) validate(item, props[k], where + "." + k, errs);
      else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
        errs.push_back(where + ": unexpected key " + k);
      }
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
      errs.push_back(where + ": too few items");
    }
    if (s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], s["items"], where + "[" + std::to_string(i) + "]", errs);
    }
  }
}

void check_schema(const fs::path& file, const std::string& schema) {
  const auto doc = json::parse(slurp(file));
  const auto s = json::parse(slurp(fs::path(BNRAD_SOURCE_DIR) / "schemas" / (schema + ".schema.json")));
  std::vector<std::string> errs;
  validate(doc, s, schema, errs);
  INFO(file.string());
  for (const auto& e : errs) INFO(e);
  CHECK(errs.empty());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("number formatting") {
  CHECK(format_number(1.0) == "1.00000000000e+00");
  CHECK(format_number(-0.000123456789012345) == "-1.23456789012e-04");
  CHECK_THROWS_AS(format_number(std::nan("")), NumericError);
  CHECK_THROWS_AS(format_number(INFINITY), NumericError);
  Table t{{"a", "b"}, {{1.0, 2.0}}};
  CHECK(to_csv(t) == "a,b\n1.00000000000e+00,2.00000000000e+00\n");
  t.rows.push_back({1.0, NAN});
  CHECK_THROWS_AS(to_csv(t), NumericError);
}

TEST_CASE("usage errors exit 2 with one line") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"shoot", "--dim", "6", "--gamma", "-1"},
           {"shoot", "--dim", "6"},
           {"shoot", "--gamma", "1"},
           {"frobnicate"},
           {"curve", "--dim", "2"},
           {"curve", "--dim", "4", "--gamma-min", "10", "--gamma-max", "1"},
           {"shoot", "--dim", "6", "--gamma", "1", "--rel-tol", "0.5"},
           {"shoot", "--dim", "6", "--gamma", "abc"},
           {"lambda0", "--dim", "5"}}) {
    const auto r = run(args);
    INFO(r.err);
    CHECK(r.code == 2);
    CHECK(r.err.rfind("usage error: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("process exit codes") {
  const auto dir = scratch_dir("proc");
  const std::string cli = BNRAD_CLI_PATH;
  const auto status = [&](const std::string& a) {
    const int s = std::system((cli + " " + a + " --out " + dir.string() + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  CHECK(status("shoot --dim 6 --gamma -1") == 2);
  CHECK(status("shoot --dim 6 --gamma 0.5") == 0);
  // Output directory blocked by a regular file.
  std::ofstream(dir / "blocker") << "x";
  const int s = std::system((cli + " shoot --dim 6 --gamma 0.5 --out " + (dir / "blocker" / "sub").string() +
                             " >/dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(s) == 1);
}

TEST_CASE("write failure is reported with its stage") {
  const auto dir = scratch_dir("io");
  std::ofstream(dir / "blocker") << "x";
  const auto r = run({"shoot", "--dim", "6", "--gamma", "0.5", "--out", (dir / "blocker").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("error [write]") != std::string::npos);
}

TEST_CASE("shoot matches the golden file") {
  const auto dir = scratch_dir("golden");
  const auto r = run({"shoot", "--dim", "6", "--gamma", "0.5", "--json", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto got = json::parse(r.out);
  const auto want = json::parse(slurp(fs::path(BNRAD_SOURCE_DIR) / "tests/golden/shoot_N6_gamma0.5.json"));
  for (const char* key : {"T1", "T2", "t0", "y0", "lambda2", "t_start"}) {
    CAPTURE(key);
    CHECK(got[key].get<double>() == doctest::Approx(want[key].get<double>()).epsilon(1e-9));
  }
  for (std::size_t i = 0; i < want["slopes"].size(); ++i) {
    CHECK(got["slopes"][i].get<double>() == doctest::Approx(want["slopes"][i].get<double>()).epsilon(1e-9));
  }
  CHECK(slurp(dir / "shoot_N6.json") == r.out);
  CHECK_FALSE(fs::exists(dir / "shoot_N6.csv"));
  check_schema(dir / "shoot_N6.json", "shoot");
}

TEST_CASE("curve CSV header and plot data") {
  const auto dir = scratch_dir("curve");
  const auto r = run({"curve", "--dim", "3", "--gamma-min", "1", "--gamma-max", "1e4", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto csv = slurp(dir / "curve_N3.csv");
  CHECK(csv.substr(0, csv.find('\n')) ==
        "gamma,lambda2,T1,T2,t0,y0,r_node,s_min,M_plus,M_minus,J_plus,J_minus");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 49);

  const auto d4 = scratch_dir("curve4");
  REQUIRE(run({"curve", "--dim", "4", "--gamma-min", "1", "--gamma-max", "1e3", "--per-decade", "3",
               "--plot", "--csv", "--json", "--out", d4.string()})
              .code == 0);
  check_schema(d4 / "curve_N4.json", "curve");
  std::ifstream dat(d4 / "lambda2_N4.dat");
  std::string line;
  std::getline(dat, line);
  CHECK(line[0] == '#');
  double x = 0;
  double y = 0;
  double prev = 0;
  int n = 0;
  while (dat >> x >> y) {
    CHECK(x > prev);
    prev = x;
    ++n;
  }
  CHECK(n == 10);
  const auto svg = slurp(d4 / "lambda2_N4.svg");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("lambda_1(B_1)") != std::string::npos);
  CHECK(fs::exists(d4 / "t1_N4.dat"));
}

TEST_CASE("every JSON output validates") {
  const auto dir = scratch_dir("schemas");
  const std::string o = dir.string();
  REQUIRE(run({"solution", "--dim", "5", "--gamma", "100", "--json", "--out", o}).code == 0);
  check_schema(dir / "solution_N5.json", "solution");
  check_schema(dir / "rescaled_N5.json", "rescaled");
  REQUIRE(run({"energy", "--dim", "4", "--gamma", "50", "--json", "--out", o}).code == 0);
  check_schema(dir / "energy_N4.json", "energy");
  REQUIRE(run({"asymptotics", "--dim", "6", "--fast", "--out", o}).code == 0);
  check_schema(dir / "asymptotics_N6.json", "asymptotics");
  REQUIRE(run({"asymptotics", "--dim", "3", "--fast", "--out", o}).code == 0);
  check_schema(dir / "asymptotics_N3.json", "asymptotics");
  REQUIRE(run({"lambda0", "--out", o}).code == 0);
  check_schema(dir / "lambda0.json", "lambda0");
  const auto rep = run({"report", "--fast", "--dims", "3,4", "--out", o});
  CHECK((rep.code == 0 || rep.code == 1));
  check_schema(dir / "report.json", "report");
  CHECK(rep.out.find("gates failed") != std::string::npos);
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    const auto text = slurp(e.path());
    const auto head = text.substr(0, text.find('\n'));
    INFO(e.path().string());
    CHECK(head.find_first_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ") != std::string::npos);
  }
}

TEST_CASE("empty plot table warns and writes nothing") {
  const auto dir = scratch_dir("empty");
  std::ostringstream warn;
  PlotTable t;
  t.dim = 4;
  const auto files = emit_plot_data(t, PlotKind::lambda2_curve, dir, warn);
  CHECK(files.empty());
  CHECK(warn.str().find("warning") != std::string::npos);
  CHECK(fs::is_empty(dir));
}

TEST_CASE("config file, flag precedence and environment") {
  const auto dir = scratch_dir("config");
  const auto cfg_path = dir / "run.ini";
  std::ofstream(cfg_path) << "dim = 5\ngamma = 2.5\nrel-tol = 1e-9\n";
  std::ostringstream out;
  bool help = false;
  auto cfg = parse_args({"shoot", "--config", cfg_path.string(), "--gamma", "3"}, out, help);
  CHECK(cfg.dim == 5);
  CHECK(*cfg.gamma == 3.0);
  CHECK(cfg.rel_tol == 1e-9);
  CHECK(cfg.csv);
  CHECK_FALSE(cfg.json);

  ::setenv(kOutputDirEnv, (dir / "env").string().c_str(), 1);
  cfg = parse_args({"shoot", "--dim", "4", "--gamma", "1"}, out, help);
  CHECK(cfg.out_dir == dir / "env");
  cfg = parse_args({"shoot", "--dim", "4", "--gamma", "1", "--out", "elsewhere"}, out, help);
  CHECK(cfg.out_dir == "elsewhere");
  ::unsetenv(kOutputDirEnv);

  CHECK_THROWS_AS(parse_args({"shoot", "--config", (dir / "missing.ini").string()}, out, help),
                  ConfigError);
}

TEST_CASE("identical configs give identical bytes") {
  const auto a = scratch_dir("det_a");
  const auto b = scratch_dir("det_b");
  for (const auto& d : {a, b}) {
    REQUIRE(run({"curve", "--dim", "5", "--gamma-min", "1", "--gamma-max", "100", "--per-decade", "4",
                 "--csv", "--json", "--plot", "--out", d.string()})
                .code == 0);
  }
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    ++compared;
  }
  CHECK(compared >= 5);
}

}  // TEST_SUITE
