#include <cmath>
#include <cstdlib>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bnrad/analysis.hpp"
#include "bnrad/cli.hpp"
#include "bnrad/errors.hpp"

namespace bnrad::cli {

namespace {

const std::set<std::string> kCommands = {"shoot",       "curve",   "solution", "energy",
                                         "asymptotics", "lambda0", "report"};
const std::set<std::string> kNeedGamma = {"shoot", "solution", "energy"};
constexpr int kMaxDim = 10;

void check_gamma(int dim, double gamma, const char* what) {
  if (!std::isfinite(gamma) || !(gamma > 0.0)) {
    throw ConfigError(std::string(what) + " must be positive and finite");
  }
  ShootingInput in;
  in.dim = DimensionParams::make(dim);
  in.gamma = gamma;
  in.validate();
}

}  // namespace

void RunConfig::validate() const {
  if (!kCommands.contains(command)) throw ConfigError("unknown command '" + command + "'");
  if (command != "report" && command != "lambda0") {
    if (dim == 0) throw ConfigError(command + " requires --dim");
  }
  if (command == "lambda0" && dim != 0 && dim != 6) {
    throw ConfigError("lambda0 is defined for N = 6 only");
  }
  if (dim != 0 && (dim < 3 || dim > kMaxDim)) {
    throw ConfigError("--dim must lie in [3, " + std::to_string(kMaxDim) + "]");
  }
  for (int d : dims) {
    if (d < 3 || d > kMaxDim) throw ConfigError("--dims entries must lie in [3, 10]");
  }
  if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) throw ConfigError("--rel-tol must lie in (0, 1e-4]");
  if (!(abs_tol >= 0.0 && abs_tol <= 1e-4)) throw ConfigError("--abs-tol must lie in [0, 1e-4]");
  if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw ConfigError("--tail-eps must lie in (0, 1)");
  if (per_decade < 1 || per_decade > 200) throw ConfigError("--per-decade must lie in [1, 200]");
  if (mesh_points < 10 || mesh_points > 1000000) {
    throw ConfigError("--mesh must lie in [10, 1e6]");
  }
  if (!csv && !json) throw ConfigError("no output format selected");
  if (kNeedGamma.contains(command)) {
    if (!gamma) throw ConfigError(command + " requires --gamma");
    check_gamma(dim, *gamma, "--gamma");
  }
  if (gamma_min && dim != 0) check_gamma(dim, *gamma_min, "--gamma-min");
  if (gamma_max && dim != 0) check_gamma(dim, *gamma_max, "--gamma-max");
  if (gamma_min && gamma_max && !(*gamma_min < *gamma_max)) {
    throw ConfigError("--gamma-min must be smaller than --gamma-max");
  }
}

RunConfig parse_args(const std::vector<std::string>& args, std::ostream& out, bool& help) {
  help = false;
  RunConfig cfg;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    cfg.out_dir = env;
  }
  CLI::App app{"Radial sign-changing solutions via Emden-Fowler shooting", "bnrad"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.add_option("command", cfg.command, "shoot | curve | solution | energy | asymptotics | "
                                         "lambda0 | report")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(kCommands.begin(), kCommands.end())));
  app.add_option("--dim", cfg.dim, "space dimension N");
  double gamma = 0.0;
  auto* gamma_opt = app.add_option("--gamma", gamma, "terminal value of the orbit");
  double gmin = 0.0;
  double gmax = 0.0;
  auto* gmin_opt = app.add_option("--gamma-min", gmin, "lower end of the gamma sweep");
  auto* gmax_opt = app.add_option("--gamma-max", gmax, "upper end of the gamma sweep");
  app.add_option("--per-decade", cfg.per_decade, "sweep points per decade")->capture_default_str();
  app.add_option("--rel-tol", cfg.rel_tol, "integrator relative tolerance")->capture_default_str();
  app.add_option("--abs-tol", cfg.abs_tol, "integrator absolute tolerance (0: automatic)");
  app.add_option("--tail-eps", cfg.tail_eps, "terminal tail truncation")->capture_default_str();
  app.add_option("--mesh", cfg.mesh_points, "profile sample count")->capture_default_str();
  std::string out_dir;
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  bool want_csv = false;
  bool want_json = false;
  auto* csv_flag = app.add_flag("--csv", want_csv, "write CSV tables");
  auto* json_flag = app.add_flag("--json", want_json, "write JSON documents");
  app.add_flag("--plot", cfg.plot, "write plot data and SVG charts");
  app.add_flag("--fast", cfg.fast, "smaller sweeps");
  app.add_option("--dims", cfg.dims, "dimensions for report")->delimiter(',');

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    help = true;
    return cfg;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (const auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
    throw ConfigError(msg);
  }
  if (gamma_opt->count() > 0) cfg.gamma = gamma;
  if (gmin_opt->count() > 0) cfg.gamma_min = gmin;
  if (gmax_opt->count() > 0) cfg.gamma_max = gmax;
  if (out_opt->count() > 0) cfg.out_dir = out_dir;
  if (csv_flag->count() > 0 || json_flag->count() > 0) {
    cfg.csv = want_csv;
    cfg.json = want_json;
  }
  if (cfg.command == "lambda0" && cfg.dim == 0) cfg.dim = 6;
  cfg.validate();
  return cfg;
}

}  // namespace bnrad::cli
