#pragma once

// Command-line front end: configuration, subcommands, table writers and
// plot data.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace bnrad::cli {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "BNRAD_OUTPUT_DIR";

struct RunConfig {
  std::string command;
  int dim = 0;  ///< 0 when unset
  std::optional<double> gamma;
  /// Sweep bounds; unset bounds take per-command defaults.
  std::optional<double> gamma_min;
  std::optional<double> gamma_max;
  int per_decade = 12;
  double rel_tol = 1e-10;
  double abs_tol = 0.0;  ///< 0 selects the solver default
  double tail_eps = 1e-10;
  int mesh_points = 2000;
  std::filesystem::path out_dir = ".";
  bool csv = true;
  bool json = false;
  bool plot = false;
  bool fast = false;
  std::vector<int> dims;  ///< report only

  /// Throws ConfigError describing the first invalid field.
  void validate() const;
};

/// Parse argv into a validated RunConfig. Precedence: flags, then the
/// key = value file named by --config, then built-in defaults (the output
/// directory default comes from kOutputDirEnv when set). Throws ConfigError
/// on any usage problem; `help` is set when --help was requested and the
/// text printed to `out`.
RunConfig parse_args(const std::vector<std::string>& args, std::ostream& out, bool& help);

/// Run one invocation. Returns 0 on success, 1 on numeric or I/O failure
/// (the failing stage is named on `err`), 2 on usage errors.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ---------------------------------------------------------------------------
// Serialization

/// Scientific notation with 12 significant digits. Throws NumericError for
/// NaN or infinity.
std::string format_number(double v);

/// JSON text with every floating value printed by format_number.
std::string dump_json(const nlohmann::ordered_json& value, int indent = 2);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const Table& t);
/// Array of objects keyed by column name.
nlohmann::ordered_json to_json(const Table& t);

/// Write text atomically enough for our purposes; throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

// ---------------------------------------------------------------------------
// Plot data

enum class PlotKind { lambda2_curve, profile_overlay, t1_fit };

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotTable {
  int dim = 0;
  std::vector<Series> series;  ///< first series is the data
  std::optional<double> reference;  ///< horizontal reference line
  std::string reference_label;
};

/// Writes one two-column .dat file per series plus one SVG per kind into
/// `dir` and returns the paths written. An empty table writes nothing and
/// prints a warning to `warn`.
std::vector<std::filesystem::path> emit_plot_data(const PlotTable& table, PlotKind kind,
                                                  const std::filesystem::path& dir,
                                                  std::ostream& warn);

/// Minimal static line chart.
std::string render_svg(const PlotTable& table, bool log_x, bool log_y, const std::string& title);

// ---------------------------------------------------------------------------
// Report

struct GateResult {
  std::string id;
  std::string title;
  bool passed = false;
  bool informational = false;  ///< optional gates never fail the report
  std::string observed;
};

struct ReportOptions {
  std::vector<int> dims = {3, 4, 5, 6};
  bool fast = false;
  bool include_optional = true;
};

std::vector<GateResult> run_report(const ReportOptions& opts);
nlohmann::ordered_json report_to_json(const std::vector<GateResult>& gates);
std::string report_to_text(const std::vector<GateResult>& gates);

}  // namespace bnrad::cli
