#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bnrad/analysis.hpp"
#include "bnrad/cli.hpp"
#include "bnrad/errors.hpp"

namespace bnrad::cli {

namespace {

using json = nlohmann::ordered_json;

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;
  std::string stage = "setup";
  std::vector<std::filesystem::path> written;

  void save(const std::string& name, const std::string& text) {
    const std::string previous = stage;
    stage = "write";
    const auto path = cfg.out_dir / name;
    write_text(path, text);
    written.push_back(path);
    stage = previous;
  }
  void save_table(const std::string& stem, const Table& t, json meta = json::object()) {
    if (cfg.csv) save(stem + ".csv", to_csv(t));
    if (cfg.json) {
      meta["rows"] = to_json(t);
      save(stem + ".json", dump_json(meta));
    }
  }
  void save_json(const std::string& stem, const json& doc) { save(stem + ".json", dump_json(doc)); }
  void plot(const PlotTable& t, PlotKind kind) {
    stage = "plot";
    for (auto& p : emit_plot_data(t, kind, cfg.out_dir, err)) written.push_back(p);
  }
};

ShootingInput make_input(const RunConfig& cfg, double gamma) {
  ShootingInput in;
  in.dim = DimensionParams::make(cfg.dim);
  in.gamma = gamma;
  in.rel_tol = cfg.rel_tol;
  in.abs_tol = cfg.abs_tol;
  in.tail_eps = cfg.tail_eps;
  return in;
}

std::shared_ptr<const ShootingResult> solve(const RunConfig& cfg, double gamma) {
  return std::make_shared<const ShootingResult>(solve_shooting(make_input(cfg, gamma)));
}

std::vector<double> sweep_gammas(const RunConfig& cfg, double lo, double hi) {
  const double a = cfg.gamma_min.value_or(lo);
  const double b = cfg.gamma_max.value_or(hi);
  if (!(a < b)) throw ConfigError("empty gamma range [" + format_number(a) + ", " +
                                  format_number(b) + "]");
  return log_spaced_gammas(a, b, cfg.per_decade);
}

std::string suffix(const RunConfig& cfg) { return "_N" + std::to_string(cfg.dim); }

json fit_json(const FitReport& f) {
  return json{{"model", to_string(f.model)},     {"exponent", f.exponent},
              {"prefactor", f.prefactor},         {"rms_residual", f.rms_residual},
              {"max_deviation", f.max_deviation}, {"gamma_min", f.gamma_min},
              {"gamma_max", f.gamma_max},         {"n_points", f.n_points}};
}

json shooting_json(const ShootingResult& r) {
  const auto& d = r.input.dim;
  return json{{"N", d.N},
              {"gamma", r.input.gamma},
              {"t_start", r.t_start},
              {"zeros", r.zeros},
              {"slopes", r.slopes},
              {"T1", r.zeros[0]},
              {"T2", r.zeros[1]},
              {"t0", r.t0},
              {"y0", r.y0},
              {"lambda2", lambda_n_of_gamma(d, r, 2)},
              {"steps_accepted", r.steps_accepted},
              {"steps_rejected", r.steps_rejected}};
}

void cmd_shoot(Context& c) {
  c.stage = "shooting";
  const auto r = solve_shooting(make_input(c.cfg, *c.cfg.gamma));
  const json doc = shooting_json(r);
  Table t;
  t.columns = {"gamma", "T1", "T2", "T3", "t0", "y0", "slope1", "slope2", "slope3", "lambda2"};
  t.rows.push_back({r.input.gamma, r.zeros[0], r.zeros[1], r.zeros[2], r.t0, r.y0, r.slopes[0],
                    r.slopes[1], r.slopes[2], doc["lambda2"].get<double>()});
  if (c.cfg.json) {
    c.out << dump_json(doc);
    c.save_json("shoot" + suffix(c.cfg), doc);
  }
  if (c.cfg.csv) {
    const std::string csv = to_csv(t);
    if (!c.cfg.json) c.out << csv;
    c.save("shoot" + suffix(c.cfg) + ".csv", csv);
  }
}

Table curve_table(const std::vector<SweepRow>& rows) {
  Table t;
  t.columns = {"gamma", "lambda2", "T1",     "T2",      "t0",     "y0",
               "r_node", "s_min",  "M_plus", "M_minus", "J_plus", "J_minus"};
  for (const auto& r : rows) {
    t.rows.push_back({r.gamma, r.lambda2, r.T1, r.T2, r.t0, r.y0, r.r_node, r.s_min, r.M_plus,
                      r.M_minus, r.J_plus, r.J_minus});
  }
  return t;
}

PlotTable t1_plot(int N, const std::vector<std::pair<double, double>>& pts) {
  PlotTable p;
  p.dim = N;
  p.series.push_back({"T1", pts});
  if (pts.size() >= 4) {
    const auto fit = fit_power_law(pts, FitModel::power);
    Series s{"power fit", {}};
    for (const auto& pt : pts) {
      s.points.emplace_back(pt.first, fit.prefactor * std::pow(pt.first, fit.exponent));
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

void cmd_curve(Context& c) {
  const double hi = (c.cfg.fast && c.cfg.dim == 6) ? 1e3 : 1e4;
  const auto gammas = sweep_gammas(c.cfg, 1.0, hi);
  c.stage = "sweep";
  SweepOptions opts;
  opts.rel_tol = c.cfg.rel_tol;
  const auto rows = sweep(DimensionParams::make(c.cfg.dim), gammas, opts);
  c.save_table("curve" + suffix(c.cfg), curve_table(rows), json{{"N", c.cfg.dim}});
  if (c.cfg.plot) {
    PlotTable lam;
    lam.dim = c.cfg.dim;
    Series s{"lambda2", {}};
    std::vector<std::pair<double, double>> t1;
    for (const auto& r : rows) {
      s.points.emplace_back(r.gamma, r.lambda2);
      t1.emplace_back(r.gamma, r.T1);
    }
    lam.series.push_back(std::move(s));
    lam.reference = radial_eigenvalue(DimensionParams::make(c.cfg.dim), 1);
    lam.reference_label = "lambda_1(B_1)";
    c.plot(lam, PlotKind::lambda2_curve);
    c.plot(t1_plot(c.cfg.dim, t1), PlotKind::t1_fit);
  }
}

void cmd_solution(Context& c) {
  c.stage = "shooting";
  const auto res = solve(c.cfg, *c.cfg.gamma);
  c.stage = "transform";
  const auto prof = build_radial_profile(res, 2, c.cfg.mesh_points);
  const auto resc = std::make_shared<const RescaledProfile>(prof, c.cfg.mesh_points);
  const double residual = ode_residual(*prof);
  const double bub = bubble_deviation(*resc);

  Table t;
  t.columns = {"r", "u", "du_dr"};
  for (const auto& s : prof->samples()) t.rows.push_back({s.r, s.u, s.up});
  const auto bubble = BubbleSpec::normalized(c.cfg.dim);
  Table rt;
  rt.columns = {"rho", "u_tilde", "bubble"};
  for (const auto& [rho, v] : resc->samples()) rt.rows.push_back({rho, v, bubble_eval(bubble, rho)});

  const json meta{{"N", c.cfg.dim},           {"gamma", *c.cfg.gamma},
                  {"lambda", prof->lambda()}, {"r_node", prof->r_node()},
                  {"s_min", prof->s_min()},   {"M_plus", prof->M_plus()},
                  {"M_minus", prof->M_minus()}, {"sigma", resc->sigma()},
                  {"ode_residual", residual}, {"bubble_deviation", bub}};
  c.save_table("solution" + suffix(c.cfg), t, meta);
  c.save_table("rescaled" + suffix(c.cfg), rt, json{{"N", c.cfg.dim}, {"sigma", resc->sigma()}});
  if (c.cfg.plot) {
    PlotTable p;
    p.dim = c.cfg.dim;
    Series a{"u_tilde", {}};
    Series b{"bubble", {}};
    for (int i = 0; i <= 500; ++i) {
      const double rho = 5.0 * i / 500;
      a.points.emplace_back(rho, rho <= resc->sigma() ? resc->at(rho) : 0.0);
      b.points.emplace_back(rho, bubble_eval(bubble, rho));
    }
    p.series = {std::move(a), std::move(b)};
    c.plot(p, PlotKind::profile_overlay);
  }
}

json energy_json(const DimensionParams& d, const EnergyReport& e) {
  const auto part = [](const PartIntegrals& v) {
    return json{{"dirichlet", v.dirichlet}, {"l2", v.l2}, {"lcrit", v.lcrit}};
  };
  const double limit = std::pow(sobolev_constant(d.N), d.N / 2.0) / d.N;
  return json{{"lambda", e.lambda},
              {"plus", part(e.plus)},
              {"minus", part(e.minus)},
              {"J_plus", e.J_plus},
              {"J_minus", e.J_minus},
              {"J_total", e.J_total},
              {"nehari_residual_plus", e.nehari_residual_plus},
              {"nehari_residual_minus", e.nehari_residual_minus},
              {"bubble_energy", limit},
              {"J_plus_over_bubble_energy", e.J_plus / limit}};
}

void cmd_energy(Context& c) {
  c.stage = "shooting";
  const auto res = solve(c.cfg, *c.cfg.gamma);
  c.stage = "energy";
  const auto prof = build_radial_profile(res, 2, c.cfg.mesh_points);
  const auto e = energy(*prof);
  const auto d = DimensionParams::make(c.cfg.dim);
  json doc{{"N", c.cfg.dim}, {"gamma", *c.cfg.gamma}};
  doc.update(energy_json(d, e));
  if (c.cfg.json) c.save_json("energy" + suffix(c.cfg), doc);
  if (c.cfg.csv) {
    Table t;
    t.columns = {"gamma",   "lambda",     "J_plus",       "J_minus",
                 "J_total", "nehari_plus", "nehari_minus", "J_plus_over_bubble_energy"};
    t.rows.push_back({*c.cfg.gamma, e.lambda, e.J_plus, e.J_minus, e.J_total,
                      e.nehari_residual_plus, e.nehari_residual_minus,
                      doc["J_plus_over_bubble_energy"].get<double>()});
    c.save("energy" + suffix(c.cfg) + ".csv", to_csv(t));
  }
  c.out << dump_json(doc);
}

void cmd_asymptotics(Context& c) {
  const auto d = DimensionParams::make(c.cfg.dim);
  const auto gammas = sweep_gammas(c.cfg, 1e2, 1e4);
  if (gammas.size() < 4) throw ConfigError("asymptotics needs at least 4 sweep points");
  c.stage = "sweep";
  SweepOptions opts;
  opts.rel_tol = c.cfg.rel_tol;
  opts.with_energy = false;
  const auto rows = sweep(d, gammas, opts);
  std::vector<std::pair<double, double>> t1;
  for (const auto& r : rows) t1.emplace_back(r.gamma, r.T1);

  c.stage = "fit";
  json doc{{"N", d.N}, {"gammas", gammas}};
  doc["T1_power_fit"] = fit_json(fit_power_law(t1, FitModel::power));
  doc["T1_log_fit"] = fit_json(fit_power_law(t1, FitModel::log));
  doc["T1_constant_fit"] = fit_json(fit_power_law(t1, FitModel::constant));
  doc["T1_over_2log_gamma_at_max"] = rows.back().T1 / (2.0 * std::log(rows.back().gamma));
  if (d.k > 2.0 && d.k < 3.0) {
    const auto cand = zero_prefactor_candidates(d.k);
    const double fitted = rows.back().T1 / std::pow(rows.back().gamma, 6.0 - 2.0 * d.k);
    doc["T1_prefactor"] = json{{"observed_at_max", fitted},
                               {"split_parse", cand.split},
                               {"grouped_parse", cand.grouped},
                               {"split_relative_gap", std::abs(fitted / cand.split - 1.0)},
                               {"grouped_relative_gap", std::abs(fitted / cand.grouped - 1.0)}};
  }

  c.stage = "slope law";
  const auto sl = slope_law_check(d, gammas);
  doc["slope_law"] = json{{"fit", fit_json(sl.fit)},
                          {"target", sl.target},
                          {"value_at_max", sl.value_at_max},
                          {"relative_error", sl.relative_error}};

  c.stage = "lambda2 limit";
  const auto ls = lambda2_limit_study(d, gammas);
  doc["lambda2_limit"] = json{{"target", ls.target},
                              {"target_name", ls.target_name},
                              {"lambda1_ball", ls.lambda1},
                              {"lambda2_ball", ls.lambda2_ball},
                              {"value_at_max", ls.rows.back().second},
                              {"relative_error_at_max", ls.relative_error_at_max},
                              {"above_lambda1_everywhere", ls.above_lambda1_everywhere},
                              {"below_lambda1_on_tail", ls.below_lambda1_on_tail},
                              {"below_lambda2_ball_everywhere", ls.below_lambda2_ball_everywhere},
                              {"decreasing", ls.decreasing}};

  c.stage = "negative part";
  const auto np = negative_part_study(d, gammas);
  json npj{{"strictly_decreasing_tail", np.strictly_decreasing_tail},
           {"decay_ratio", np.decay_ratio}};
  json nrows = json::array();
  for (const auto& r : np.rows) {
    json row{{"gamma", r.gamma},
             {"lambda2", r.lambda2},
             {"M_minus", r.M_minus},
             {"M_minus_over_half_lambda2", r.ratio_half_lambda}};
    if (r.deviation_u0) row["deviation_from_u0"] = *r.deviation_u0;
    nrows.push_back(row);
  }
  npj["rows"] = nrows;
  if (np.u0_sup) npj["u0_sup"] = *np.u0_sup;
  doc["negative_part"] = npj;

  if (d.N == 6) {
    c.stage = "minimum law";
    const auto mm = t0_y0_asymptotics(gammas);
    doc["minimum_law"] = json{{"y0_fit", fit_json(mm.y0_fit)},
                              {"t0_ratio_fit", fit_json(mm.t0_fit)},
                              {"y0_at_max", mm.y0_at_max},
                              {"t0_ratio_at_max", mm.t0_ratio_at_max}};
  }
  c.save_json("asymptotics" + suffix(c.cfg), doc);
  if (c.cfg.csv) {
    Table t;
    t.columns = {"gamma", "T1", "gamma_slope1", "lambda2", "M_minus"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      t.rows.push_back({rows[i].gamma, rows[i].T1, rows[i].gamma * rows[i].slope1,
                        rows[i].lambda2, rows[i].M_minus});
    }
    c.save("asymptotics" + suffix(c.cfg) + ".csv", to_csv(t));
  }
  if (c.cfg.plot) c.plot(t1_plot(d.N, t1), PlotKind::t1_fit);
}

void cmd_lambda0(Context& c) {
  c.stage = "lambda0";
  const auto l0 = lambda0_six(0.01);
  const auto d = DimensionParams::make(6);
  json samples = json::array();
  for (const auto& [g, l] : l0.route_b_samples) samples.push_back(json{{"gamma", g}, {"lambda2", l}});
  const json doc{{"route_a", l0.route_a},
                 {"route_b", l0.route_b},
                 {"relative_gap", l0.relative_gap},
                 {"route_b_samples", samples},
                 {"lambda1_ball", radial_eigenvalue(d, 1)},
                 {"u0_center", l0.u0->M_plus()},
                 {"u0_center_over_lambda0", l0.u0->M_plus() / l0.route_a}};
  c.save_json("lambda0", doc);
  if (c.cfg.csv) {
    Table t;
    t.columns = {"r", "u", "du_dr"};
    for (const auto& s : l0.u0->samples()) t.rows.push_back({s.r, s.u, s.up});
    c.save("u0_profile.csv", to_csv(t));
  }
  c.out << dump_json(doc);
}

void cmd_report(Context& c) {
  c.stage = "report";
  ReportOptions opts;
  if (!c.cfg.dims.empty()) opts.dims = c.cfg.dims;
  opts.fast = c.cfg.fast;
  opts.include_optional = !c.cfg.fast;
  const auto gates = run_report(opts);
  c.save_json("report", report_to_json(gates));
  const std::string text = report_to_text(gates);
  c.save("report.txt", text);
  c.out << text;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    bool help = false;
    cfg = parse_args(args, out, help);
    if (help) return 0;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  Context c{cfg, out, err, "setup", {}};
  try {
    if (cfg.command == "shoot") {
      cmd_shoot(c);
    } else if (cfg.command == "curve") {
      cmd_curve(c);
    } else if (cfg.command == "solution") {
      cmd_solution(c);
    } else if (cfg.command == "energy") {
      cmd_energy(c);
    } else if (cfg.command == "asymptotics") {
      cmd_asymptotics(c);
    } else if (cfg.command == "lambda0") {
      cmd_lambda0(c);
    } else {
      cmd_report(c);
    }
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error [" << c.stage << "]: " << e.what() << '\n';
    return 1;
  }
  for (const auto& p : c.written) err << "wrote " << p.string() << '\n';
  return 0;
}

}  // namespace bnrad::cli
