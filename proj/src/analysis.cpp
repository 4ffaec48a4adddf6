#include "bnrad/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "bnrad/errors.hpp"
#include "bnrad/quadrature.hpp"

namespace bnrad {

namespace {

using GaussRule = boost::math::quadrature::gauss<double, 10>;

struct TIntegrals {
  double grad = 0.0;  // int y'^2 dt
  double sq = 0.0;    // int y^2 t^-k dt
  double crit = 0.0;  // int |y|^2* t^-k dt
};

// Integrals of the orbit over [a, b] in t, one Gauss rule per integrator
// step piece, taken in x = ln t.
TIntegrals orbit_integrals(const DimensionParams& dim, const Trajectory& traj, double a,
                           double b, int refinement) {
  TIntegrals acc;
  const auto nodes = traj.nodes();
  const auto& xs = GaussRule::abscissa();
  const auto& ws = GaussRule::weights();
  const auto add_piece = [&](double lo, double hi) {
    const double xa = std::log(lo);
    const double xb = std::log(hi);
    const double half = 0.5 * (xb - xa);
    const double mid = 0.5 * (xa + xb);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (int s : {-1, 1}) {
        if (s == 1 && xs[i] == 0.0) continue;
        const double x = mid + s * half * xs[i];
        const double t = std::exp(x);
        const auto v = traj.evaluate(std::clamp(t, traj.t_min(), traj.t_start()));
        const double w = ws[i] * half * t;
        const double tk = std::pow(t, -dim.k);
        acc.grad += w * v.yp * v.yp;
        acc.sq += w * v.y * v.y * tk;
        acc.crit += w * std::pow(std::abs(v.y), dim.two_star) * tk;
      }
    }
  };
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double lo = std::max(nodes[i + 1].t, a);
    const double hi = std::min(nodes[i].t, b);
    if (!(hi > lo)) continue;
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / refinement;
    for (int j = 0; j < refinement; ++j) {
      const double p = std::exp(llo + j * step);
      const double q = j + 1 == refinement ? hi : std::exp(llo + (j + 1) * step);
      add_piece(p, q);
    }
  }
  return acc;
}

double nehari_residual(double lambda, const PartIntegrals& v) {
  if (v.dirichlet == 0.0) return 0.0;
  return std::abs(v.dirichlet - lambda * v.l2 - v.lcrit) / v.dirichlet;
}

void finish_report(const DimensionParams& dim, EnergyReport& rep) {
  rep.J_plus = part_energy(dim, rep.lambda, rep.plus);
  rep.J_minus = part_energy(dim, rep.lambda, rep.minus);
  rep.J_total = rep.J_plus + rep.J_minus;
  rep.nehari_residual_plus = nehari_residual(rep.lambda, rep.plus);
  rep.nehari_residual_minus = nehari_residual(rep.lambda, rep.minus);
}

void require_sorted_gammas(const std::vector<double>& gammas, std::size_t min_count,
                           const char* who) {
  if (gammas.size() < min_count) {
    std::ostringstream os;
    os << who << ": need at least " << min_count << " gamma values, got " << gammas.size();
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0) || (i > 0 && !(gammas[i] > gammas[i - 1]))) {
      throw DomainError(std::string(who) + ": gammas must be positive and strictly increasing");
    }
  }
}

std::shared_ptr<const ShootingResult> solve_shared(const DimensionParams& dim, double gamma,
                                                   double rel_tol = 1e-10) {
  ShootingInput in;
  in.dim = dim;
  in.gamma = gamma;
  in.rel_tol = rel_tol;
  return std::make_shared<const ShootingResult>(solve_shooting(in));
}

std::shared_ptr<const RadialProfile> positive_solution_six() {
  const auto dim = DimensionParams::make(6);
  return build_radial_profile(solve_shared(dim, 0.5), 1);
}

}  // namespace

double part_energy(const DimensionParams& dim, double lambda, const PartIntegrals& v) {
  return 0.5 * v.dirichlet - 0.5 * lambda * v.l2 - v.lcrit / dim.two_star;
}

EnergyReport energy(const RadialProfile& profile, int refinement) {
  if (refinement < 1) throw DomainError("energy: refinement must be at least 1");
  if (profile.n_nodal() > 2) throw DomainError("energy: profiles with more than two nodal regions");
  const auto& dim = profile.dim();
  const auto& orbit = profile.orbit();
  const auto& traj = *orbit.trajectory;
  const double k = dim.k;
  const double m = dim.N - 2.0;
  const double c = sphere_area(dim.N) * std::pow(m, dim.N - 1.0);
  const double lambda = profile.lambda();

  EnergyReport rep;
  rep.lambda = lambda;

  const double T1 = orbit.zeros[0];
  const double ts = traj.t_start();
  TIntegrals pos = orbit_integrals(dim, traj, T1, ts, refinement);
  // Beyond t_start: y' from the one-term tail, y frozen at gamma.
  const double g = profile.gamma();
  const double fg = ef_nonlinearity(dim, g);
  pos.grad += fg * fg / ((k - 1.0) * (k - 1.0)) * std::pow(ts, 3.0 - 2.0 * k) / (2.0 * k - 3.0);
  pos.sq += g * g * std::pow(ts, 1.0 - k) / (k - 1.0);
  pos.crit += std::pow(g, dim.two_star) * std::pow(ts, 1.0 - k) / (k - 1.0);
  rep.plus = {c * pos.grad, c * pos.sq / lambda, c * pos.crit};

  if (profile.n_nodal() == 2) {
    const TIntegrals neg = orbit_integrals(dim, traj, orbit.zeros[1], T1, refinement);
    rep.minus = {c * neg.grad, c * neg.sq / lambda, c * neg.crit};
  }
  finish_report(dim, rep);
  for (double v : {rep.plus.dirichlet, rep.plus.l2, rep.plus.lcrit, rep.minus.dirichlet,
                   rep.minus.l2, rep.minus.lcrit}) {
    if (!std::isfinite(v)) throw NumericError("energy: non-finite integral");
  }
  return rep;
}

PartIntegrals radial_norms(int N, const std::function<double(double)>& u,
                           const std::function<double(double)>& up, double a, double b,
                           const std::vector<double>& breakpoints, double rel_tol) {
  const auto dim = DimensionParams::make(N);
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > cuts.back() && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  PartIntegrals out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    out.dirichlet += integrate([&](double r) {
                       const double d = up(r);
                       return d * d * std::pow(r, N - 1);
                     }, lo, hi, rel_tol).value;
    out.l2 += integrate([&](double r) {
                const double v = u(r);
                return v * v * std::pow(r, N - 1);
              }, lo, hi, rel_tol).value;
    out.lcrit += integrate([&](double r) {
                   return std::pow(std::abs(u(r)), dim.two_star) * std::pow(r, N - 1);
                 }, lo, hi, rel_tol).value;
  }
  const double w = sphere_area(N);
  out.dirichlet *= w;
  out.l2 *= w;
  out.lcrit *= w;
  return out;
}

EnergyReport energy_radial_quadrature(const RadialProfile& profile, double rel_tol) {
  const auto& dim = profile.dim();
  const auto u = [&](double r) { return profile.at(r).u; };
  const auto up = [&](double r) { return profile.at(r).up; };
  // Resolve the concentration scale of the core.
  const double core = std::pow(profile.M_plus(), -dim.beta);
  std::vector<double> cuts;
  for (double f : {0.1, 1.0, 10.0, 100.0}) cuts.push_back(f * core);
  EnergyReport rep;
  rep.lambda = profile.lambda();
  rep.plus = radial_norms(dim.N, u, up, 0.0, profile.r_node(), cuts, rel_tol);
  if (profile.n_nodal() == 2) {
    rep.minus = radial_norms(dim.N, u, up, profile.r_node(), 1.0, {profile.s_min()}, rel_tol);
  }
  finish_report(dim, rep);
  return rep;
}

std::string to_string(FitModel m) {
  switch (m) {
    case FitModel::power:
      return "power";
    case FitModel::log:
      return "log";
    case FitModel::constant:
      return "constant";
  }
  return "unknown";
}

FitReport fit_power_law(const std::vector<std::pair<double, double>>& points, FitModel model) {
  if (points.size() < 4) {
    throw DomainError("fit_power_law: at least 4 points are required, got " +
                      std::to_string(points.size()));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [g, v] = points[i];
    if (!(g > 0.0) || (i > 0 && !(g > points[i - 1].first))) {
      throw DomainError("fit_power_law: gamma must be positive and strictly increasing");
    }
    if (!std::isfinite(v)) throw DomainError("fit_power_law: non-finite value");
    if (model != FitModel::constant && !(v > 0.0)) {
      throw DomainError("fit_power_law: values must be positive for the " + to_string(model) +
                        " model");
    }
    if (model == FitModel::log && !(g > 1.0)) {
      throw DomainError("fit_power_law: the log model needs gamma > 1");
    }
  }
  FitReport rep;
  rep.model = model;
  rep.n_points = static_cast<int>(points.size());
  rep.gamma_min = points.front().first;
  rep.gamma_max = points.back().first;
  const double n = static_cast<double>(points.size());

  if (model == FitModel::constant) {
    double sum = 0.0;
    for (const auto& pt : points) sum += pt.second;
    rep.prefactor = sum / n;
    double ss = 0.0;
    for (const auto& pt : points) {
      const double d = pt.second - rep.prefactor;
      rep.max_deviation = std::max(rep.max_deviation, std::abs(d));
      ss += d * d;
    }
    rep.rms_residual = std::sqrt(ss / n) / std::abs(rep.prefactor);
    return rep;
  }

  std::vector<double> X;
  std::vector<double> Y;
  for (const auto& [g, v] : points) {
    if (model == FitModel::power) {
      X.push_back(std::log(g));
      Y.push_back(std::log(v));
    } else {
      X.push_back(1.0 / std::log(g));
      Y.push_back(v / std::log(g));
    }
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_power_law: degenerate abscissae");
  const double slope = sxy / sxx;
  const double icept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double fit = icept + slope * X[i];
    // Residual of log(value) in both models.
    const double r = model == FitModel::power ? Y[i] - fit : (Y[i] - fit) / Y[i];
    ss += r * r;
    rep.max_deviation = std::max(rep.max_deviation, std::abs(r));
  }
  rep.rms_residual = std::sqrt(ss / n);
  if (model == FitModel::power) {
    rep.exponent = slope;
    rep.prefactor = std::exp(icept);
  } else {
    rep.exponent = slope;
    rep.prefactor = icept;
  }
  return rep;
}

std::vector<double> log_spaced_gammas(double gamma_min, double gamma_max, int per_decade) {
  if (!(gamma_min > 0.0) || !(gamma_max >= gamma_min) || per_decade < 1) {
    throw DomainError("log_spaced_gammas: need 0 < gamma_min <= gamma_max and per_decade >= 1");
  }
  const double a = std::log10(gamma_min);
  const double b = std::log10(gamma_max);
  const int steps = std::max(1, static_cast<int>(std::ceil((b - a) * per_decade - 1e-9)));
  std::vector<double> out;
  if (gamma_max == gamma_min) return {gamma_min};
  for (int i = 0; i <= steps; ++i) {
    out.push_back(i == steps ? gamma_max : std::pow(10.0, a + (b - a) * i / steps));
  }
  return out;
}

SlopeLawReport slope_law_check(const DimensionParams& dim, const std::vector<double>& gammas) {
  require_sorted_gammas(gammas, 4, "slope_law_check");
  SlopeLawReport rep;
  rep.target = std::pow(dim.k - 1.0, 1.0 / (dim.k - 2.0));
  for (double g : gammas) {
    const auto res = solve_shooting(dim, g);
    rep.points.emplace_back(g, g * res.slopes[0]);
  }
  rep.fit = fit_power_law(rep.points, FitModel::constant);
  rep.value_at_max = rep.points.back().second;
  rep.relative_error = std::abs(rep.value_at_max - rep.target) / rep.target;
  return rep;
}

MinimumLawReport t0_y0_asymptotics(const std::vector<double>& gammas) {
  require_sorted_gammas(gammas, 4, "t0_y0_asymptotics");
  const auto dim = DimensionParams::make(6);
  MinimumLawReport rep;
  std::vector<std::pair<double, double>> y0_pts;
  std::vector<std::pair<double, double>> t0_pts;
  for (double g : gammas) {
    const auto res = solve_shooting(dim, g);
    const double ratio = res.t0 / std::pow(2.0 * g / 9.0, 2.0 / 3.0);
    rep.gammas.push_back(g);
    rep.y0.push_back(res.y0);
    rep.t0_ratio.push_back(ratio);
    y0_pts.emplace_back(g, res.y0);
    t0_pts.emplace_back(g, ratio);
  }
  rep.y0_fit = fit_power_law(y0_pts, FitModel::constant);
  rep.t0_fit = fit_power_law(t0_pts, FitModel::constant);
  rep.y0_at_max = rep.y0.back();
  rep.t0_ratio_at_max = rep.t0_ratio.back();
  return rep;
}

Lambda0Result lambda0_six(double tolerance) {
  const auto dim = DimensionParams::make(6);
  Lambda0Result out;
  out.u0 = positive_solution_six();
  out.route_a = out.u0->lambda();
  // lambda_2 dips below its limit near gamma = 1e4 before approaching it
  // again, so the extrapolation uses the last decade below the gamma cap.
  for (double g : {1e5, std::pow(10.0, 5.5), 1e6}) {
    const auto res = solve_shooting(dim, g);
    out.route_b_samples.emplace_back(g, lambda_n_of_gamma(dim, res, 2));
  }
  // Aitken extrapolation; falls back to the last sample when the
  // differences do not contract.
  const double x1 = out.route_b_samples[0].second;
  const double x2 = out.route_b_samples[1].second;
  const double x3 = out.route_b_samples[2].second;
  const double d1 = x2 - x1;
  const double d2 = x3 - x2;
  out.route_b = x3;
  if (d1 != 0.0 && std::abs(d2) < std::abs(d1) && d1 * d2 > 0.0) {
    out.route_b = x3 - d2 * d2 / (d2 - d1);
  }
  out.relative_gap = std::abs(out.route_b - out.route_a) / out.route_a;
  const double allowed = std::max(tolerance, 0.01);
  if (out.relative_gap > allowed) {
    std::ostringstream os;
    os << "lambda0_six: routes disagree, gamma = 1/2 gives " << out.route_a
       << " while the large-gamma extrapolation gives " << out.route_b << " (relative gap "
       << out.relative_gap << " > " << allowed << ")";
    throw NumericError(os.str());
  }
  return out;
}

double negative_part_deviation(const RadialProfile& profile, const RadialProfile& u0,
                               double r_lo, int samples) {
  if (samples < 2 || !(r_lo > 0.0 && r_lo < 1.0)) {
    throw DomainError("negative_part_deviation: need r_lo in (0, 1) and samples >= 2");
  }
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = r_lo + (1.0 - r_lo) * i / (samples - 1);
    const double neg = std::max(-profile.at(r).u, 0.0);
    worst = std::max(worst, std::abs(neg - u0.at(r).u));
  }
  return worst;
}

double bubble_deviation(const RescaledProfile& rescaled, double rho_max, int samples) {
  if (samples < 2 || !(rho_max > 0.0)) {
    throw DomainError("bubble_deviation: need rho_max > 0 and samples >= 2");
  }
  const auto bubble = BubbleSpec::normalized(rescaled.dim().N);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double rho = rho_max * i / (samples - 1);
    // The positive part vanishes beyond sigma.
    const double v = rho <= rescaled.sigma() ? rescaled.at(rho) : 0.0;
    worst = std::max(worst, std::abs(v - bubble_eval(bubble, rho)));
  }
  return worst;
}

SweepRow sweep_point(const DimensionParams& dim, double gamma, const SweepOptions& opts) {
  const auto res = solve_shared(dim, gamma, opts.rel_tol);
  const auto prof = build_radial_profile(res, 2);
  SweepRow row;
  row.gamma = gamma;
  row.lambda2 = prof->lambda();
  row.T1 = res->zeros[0];
  row.T2 = res->zeros[1];
  row.t0 = res->t0;
  row.y0 = res->y0;
  row.slope1 = res->slopes[0];
  row.r_node = prof->r_node();
  row.s_min = prof->s_min();
  row.M_plus = prof->M_plus();
  row.M_minus = prof->M_minus();
  if (opts.with_energy) {
    const auto e = energy(*prof);
    row.J_plus = e.J_plus;
    row.J_minus = e.J_minus;
    row.nehari_plus = e.nehari_residual_plus;
    row.nehari_minus = e.nehari_residual_minus;
  }
  return row;
}

std::vector<SweepRow> sweep(const DimensionParams& dim, const std::vector<double>& gammas,
                            const SweepOptions& opts) {
  std::vector<SweepRow> rows;
  rows.reserve(gammas.size());
  for (double g : gammas) rows.push_back(sweep_point(dim, g, opts));
  return rows;
}

NegativePartStudy negative_part_study(const DimensionParams& dim,
                                      const std::vector<double>& gammas) {
  require_sorted_gammas(gammas, 3, "negative_part_study");
  NegativePartStudy st;
  std::shared_ptr<const RadialProfile> u0;
  if (dim.N == 6) {
    u0 = positive_solution_six();
    st.u0_sup = u0->M_plus();
  }
  for (double g : gammas) {
    const auto prof = build_radial_profile(solve_shared(dim, g), 2);
    NegativePartRow row;
    row.gamma = g;
    row.lambda2 = prof->lambda();
    row.M_minus = prof->M_minus();
    row.ratio_half_lambda = prof->M_minus() / (0.5 * prof->lambda());
    if (u0) row.deviation_u0 = negative_part_deviation(*prof, *u0);
    st.rows.push_back(row);
  }
  const std::size_t n = st.rows.size();
  st.strictly_decreasing_tail = true;
  for (std::size_t i = n - 2; i < n; ++i) {
    if (!(st.rows[i].M_minus < st.rows[i - 1].M_minus)) st.strictly_decreasing_tail = false;
  }
  st.decay_ratio = st.rows.back().M_minus / st.rows.front().M_minus;
  return st;
}

Lambda2Study lambda2_limit_study(const DimensionParams& dim, const std::vector<double>& gammas) {
  require_sorted_gammas(gammas, 3, "lambda2_limit_study");
  Lambda2Study st;
  st.lambda1 = radial_eigenvalue(dim, 1);
  st.lambda2_ball = radial_eigenvalue(dim, 2);
  switch (dim.N) {
    case 3:
      st.target = 2.25 * std::numbers::pi * std::numbers::pi;
      st.target_name = "9 pi^2 / 4";
      break;
    case 4:
    case 5:
      st.target = st.lambda1;
      st.target_name = "lambda_1(B_1)";
      break;
    case 6:
      st.target = positive_solution_six()->lambda();
      st.target_name = "lambda_0";
      break;
    default:
      st.target = 0.0;
      st.target_name = "0";
      break;
  }
  for (double g : gammas) {
    const auto res = solve_shooting(dim, g);
    st.rows.emplace_back(g, lambda_n_of_gamma(dim, res, 2));
  }
  const std::size_t n = st.rows.size();
  st.above_lambda1_everywhere = true;
  st.below_lambda2_ball_everywhere = true;
  st.decreasing = true;
  st.below_lambda1_on_tail = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = st.rows[i].second;
    if (!(l > st.lambda1)) st.above_lambda1_everywhere = false;
    if (!(l < st.lambda2_ball)) st.below_lambda2_ball_everywhere = false;
    if (i > 0 && !(l < st.rows[i - 1].second)) st.decreasing = false;
    if (i + 3 >= n && !(l < st.lambda1)) st.below_lambda1_on_tail = false;
  }
  const double last = st.rows.back().second;
  st.relative_error_at_max =
      st.target > 0.0 ? std::abs(last - st.target) / st.target : last / st.rows.front().second;
  return st;
}

}  // namespace bnrad
