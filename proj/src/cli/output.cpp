#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bnrad/cli.hpp"
#include "bnrad/errors.hpp"

namespace bnrad::cli {

std::string format_number(double v) {
  if (!std::isfinite(v)) throw NumericError("refusing to serialize a non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

namespace {

void dump_into(std::ostringstream& os, const nlohmann::ordered_json& v, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string pad_close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case nlohmann::ordered_json::value_t::number_float:
      os << format_number(v.get<double>());
      return;
    case nlohmann::ordered_json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << nlohmann::ordered_json(key).dump() << (indent > 0 ? ": " : ":");
        dump_into(os, item, indent, level + 1);
      }
      os << nl << pad_close << '}';
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << '[' << nl;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) os << ',' << nl;
        os << pad;
        dump_into(os, v[i], indent, level + 1);
      }
      os << nl << pad_close << ']';
      return;
    }
    default:
      os << v.dump();
  }
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& value, int indent) {
  std::ostringstream os;
  dump_into(os, value, indent, 0);
  os << '\n';
  return os.str();
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  return os.str();
}

nlohmann::ordered_json to_json(const Table& t) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) obj[t.columns[i]] = row[i];
    arr.push_back(obj);
  }
  return arr;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

std::string render_svg(const PlotTable& table, bool log_x, bool log_y, const std::string& title) {
  constexpr double W = 640;
  constexpr double H = 400;
  constexpr double ml = 70;
  constexpr double mr = 20;
  constexpr double mt = 36;
  constexpr double mb = 50;
  const auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  const auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& s : table.series) {
    for (const auto& [x, y] : s.points) {
      if ((log_x && x <= 0) || (log_y && y <= 0)) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  }
  if (table.reference && !(log_y && *table.reference <= 0)) {
    y0 = std::min(y0, ty(*table.reference));
    y1 = std::max(y1, ty(*table.reference));
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const double pady = 0.05 * (y1 - y0);
  y0 -= pady;
  y1 += pady;
  const auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * (W - ml - mr); };
  const auto py = [&](double v) { return H - mb - (ty(v) - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
     << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  const auto axis_label = [&](double v, bool logged) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", logged ? std::pow(10.0, v) : v);
    return std::string(buf);
  };
  os << "<text x=\"" << ml << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">"
     << axis_label(x0, log_x) << "</text>\n";
  os << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">"
     << axis_label(x1, log_x) << "</text>\n";
  os << "<text x=\"" << ml - 6 << "\" y=\"" << H - mb << "\" text-anchor=\"end\">"
     << axis_label(y0, log_y) << "</text>\n";
  os << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 10 << "\" text-anchor=\"end\">"
     << axis_label(y1, log_y) << "</text>\n";
  if (table.reference) {
    const double y = py(*table.reference);
    os << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << W - mr << "\" y2=\"" << y
       << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    os << "<text x=\"" << W - mr - 4 << "\" y=\"" << y - 4 << "\" text-anchor=\"end\" fill=\"gray\">"
       << table.reference_label << "</text>\n";
  }
  for (std::size_t i = 0; i < table.series.size(); ++i) {
    const auto& s = table.series[i];
    const char* color = colors[i % 4];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) {
      if ((log_x && x <= 0) || (log_y && y <= 0)) continue;
      os << px(x) << ',' << py(y) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 18 + 16 * i << "\" fill=\"" << color << "\">"
       << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> emit_plot_data(const PlotTable& table, PlotKind kind,
                                                  const std::filesystem::path& dir,
                                                  std::ostream& warn) {
  std::vector<std::filesystem::path> written;
  const bool empty = table.series.empty() || table.series.front().points.empty();
  if (empty) {
    warn << "warning: empty table, no plot data written\n";
    return written;
  }
  std::string base;
  std::string title;
  bool log_x = false;
  bool log_y = false;
  const std::string n = std::to_string(table.dim);
  switch (kind) {
    case PlotKind::lambda2_curve:
      base = "lambda2_N" + n;
      title = "lambda_2(gamma), N = " + n;
      log_x = true;
      break;
    case PlotKind::profile_overlay:
      base = "profile_N" + n;
      title = "rescaled positive part and bubble, N = " + n;
      break;
    case PlotKind::t1_fit:
      base = "t1_N" + n;
      title = "T_1(gamma), N = " + n;
      log_x = true;
      log_y = true;
      break;
  }
  for (std::size_t i = 0; i < table.series.size(); ++i) {
    const auto& s = table.series[i];
    std::ostringstream os;
    os << "# " << s.label << '\n';
    for (const auto& [x, y] : s.points) os << format_number(x) << ' ' << format_number(y) << '\n';
    const auto path = dir / (i == 0 ? base + ".dat" : base + "_" + sanitize(s.label) + ".dat");
    write_text(path, os.str());
    written.push_back(path);
  }
  const auto svg = dir / (base + ".svg");
  write_text(svg, render_svg(table, log_x, log_y, title));
  written.push_back(svg);
  return written;
}

}  // namespace bnrad::cli
