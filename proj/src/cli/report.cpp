#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <numbers>
#include <sstream>

#include "bnrad/analysis.hpp"
#include "bnrad/cli.hpp"

namespace bnrad::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

// n-th positive zero of J_nu by scanning and bisecting the standard library
// Bessel function; independent of the series used by the solver.
double bessel_zero(double nu, int n) {
  int found = 0;
  double a = 1e-3;
  double fa = std::cyl_bessel_j(nu, a);
  for (double b = a + 0.01;; b += 0.01) {
    const double fb = std::cyl_bessel_j(nu, b);
    if ((fa > 0) != (fb > 0) && ++found == n) {
      double lo = a;
      double hi = b;
      for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        if ((std::cyl_bessel_j(nu, m) > 0) == (std::cyl_bessel_j(nu, lo) > 0)) {
          lo = m;
        } else {
          hi = m;
        }
      }
      return 0.5 * (lo + hi);
    }
    a = b;
    fa = fb;
  }
}

struct DimData {
  DimensionParams dim;
  std::vector<double> gammas;
  std::vector<SweepRow> rows;
  std::shared_ptr<const RadialProfile> low;   // gamma = 1e2
  std::shared_ptr<const RadialProfile> high;  // gamma = 1e4
};

std::shared_ptr<const RadialProfile> profile_at(const DimensionParams& d, double gamma) {
  ShootingInput in;
  in.dim = d;
  in.gamma = gamma;
  return build_radial_profile(std::make_shared<const ShootingResult>(solve_shooting(in)), 2);
}

DimData collect(int N, const ReportOptions& opts) {
  DimData out{DimensionParams::make(N), {}, {}, nullptr, nullptr};
  out.gammas = log_spaced_gammas(1e2, 1e4, opts.fast ? 4 : 12);
  out.rows = sweep(out.dim, out.gammas);
  out.low = profile_at(out.dim, 1e2);
  out.high = profile_at(out.dim, 1e4);
  return out;
}

std::string tag(int N) { return ".N" + std::to_string(N); }

void gate_eigen(std::vector<GateResult>& g, const DimensionParams& d) {
  double worst = 0.0;
  for (int n : {1, 2}) {
    const double j = bessel_zero(d.nu, n);
    worst = std::max(worst, std::abs(radial_eigenvalue(d, n) / (j * j) - 1.0));
    if (d.N == 3) {
      worst = std::max(worst, std::abs(radial_eigenvalue(d, n) / (n * n * kPi * kPi) - 1.0));
    }
  }
  g.push_back({"1" + tag(d.N), "radial eigenvalues match squared Bessel zeros", worst <= 1e-8,
               false, fmt("max relative gap %.3e (n = 1, 2)", worst)});
}

void gate_t1(std::vector<GateResult>& g, const DimData& dd) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : dd.rows) pts.emplace_back(r.gamma, r.T1);
  const int N = dd.dim.N;
  const std::string trend = fmt("T1(1e2, 1e3, 1e4) = %.6g, %.6g, %.6g", dd.rows.front().T1,
                                dd.rows[dd.rows.size() / 2].T1, dd.rows.back().T1);
  if (N == 5 || N == 6) {
    const double target = N == 5 ? 2.0 / 3.0 : 1.0;
    const auto fit = fit_power_law(pts, FitModel::power);
    g.push_back({"2" + tag(N), "T1 growth exponent", std::abs(fit.exponent - target) <= 0.05, false,
                 fmt("exponent %.4f (target %.4f); ", fit.exponent, target) + trend});
  } else if (N == 4) {
    const double ratio = dd.rows.back().T1 / (2.0 * std::log(dd.rows.back().gamma));
    g.push_back({"2" + tag(N), "T1 / (2 log gamma) at gamma = 1e4", ratio >= 0.9 && ratio <= 1.1,
                 false, fmt("ratio %.4f; ", ratio) + trend});
  } else if (N == 3) {
    double lo = 1e300;
    double hi = 0.0;
    for (const auto& p : pts) {
      lo = std::min(lo, p.second);
      hi = std::max(hi, p.second);
    }
    g.push_back({"2" + tag(N), "T1 bounded over the sweep", hi / lo <= 2.0, false,
                 fmt("range [%.6g, %.6g], ratio %.4f; ", lo, hi, hi / lo) + trend});
  }
}

void gate_slope(std::vector<GateResult>& g, const DimData& dd) {
  const double target = std::pow(dd.dim.k - 1.0, 1.0 / (dd.dim.k - 2.0));
  const auto& r = dd.rows;
  const double v = r.back().gamma * r.back().slope1;
  g.push_back({"3" + tag(dd.dim.N), "gamma y'(T1) at gamma = 1e4", within(v, target, 0.02), false,
               fmt("%.5f vs %.5f (%.2f%%); trend %.5f, %.5f, %.5f", v, target,
                   100 * std::abs(v / target - 1), r.front().gamma * r.front().slope1,
                   r[r.size() / 2].gamma * r[r.size() / 2].slope1, v)});
}

void gate_minimum(std::vector<GateResult>& g, const DimData& dd) {
  const auto& r = dd.rows;
  const auto ratio = [](const SweepRow& x) { return x.t0 / std::pow(2.0 * x.gamma / 9.0, 2.0 / 3.0); };
  const double y0 = r.back().y0;
  const double tr = ratio(r.back());
  g.push_back({"4.y0", "y0 at gamma = 1e4 in [-0.51, -0.49]", y0 >= -0.51 && y0 <= -0.49, false,
               fmt("y0 = %.5f; trend %.5f, %.5f, %.5f", y0, r.front().y0, r[r.size() / 2].y0, y0)});
  g.push_back({"4.t0", "t0 / (2 gamma / 9)^(2/3) at gamma = 1e4", tr >= 0.95 && tr <= 1.05, false,
               fmt("ratio %.5f; trend %.5f, %.5f, %.5f", tr, ratio(r.front()),
                   ratio(r[r.size() / 2]), tr)});
}

void gate_limit(std::vector<GateResult>& g, const DimData& dd, double lambda0) {
  const int N = dd.dim.N;
  const auto& r = dd.rows;
  const double l1 = radial_eigenvalue(dd.dim, 1);
  const double last = r.back().lambda2;
  const std::string trend = fmt("lambda2 = %.6f, %.6f, %.6f", r.front().lambda2,
                                r[r.size() / 2].lambda2, last);
  if (N == 3) {
    const double t = 2.25 * kPi * kPi;
    g.push_back({"5" + tag(N), "lambda2(1e4) near 9 pi^2 / 4", within(last, t, 0.02), false,
                 fmt("%.3f%% off; ", 100 * std::abs(last / t - 1)) + trend});
  } else if (N == 4) {
    const bool above = std::all_of(r.begin(), r.end(), [&](const SweepRow& x) { return x.lambda2 > l1; });
    g.push_back({"5" + tag(N), "lambda2(1e4) near lambda1(B1), from above",
                 within(last, l1, 0.02) && above, false,
                 fmt("%.3f%% off, above everywhere: %s; ", 100 * std::abs(last / l1 - 1),
                     above ? "yes" : "no") + trend});
  } else if (N == 5) {
    bool below = true;
    for (std::size_t i = r.size() >= 3 ? r.size() - 3 : 0; i < r.size(); ++i) below = below && r[i].lambda2 < l1;
    g.push_back({"5" + tag(N), "lambda2(1e4) near lambda1(B1), below on the tail",
                 within(last, l1, 0.02) && below, false,
                 fmt("%.3f%% off, below on last three points: %s; ", 100 * std::abs(last / l1 - 1),
                     below ? "yes" : "no") + trend});
  } else if (N == 6) {
    g.push_back({"5" + tag(N), "lambda2(1e4) near lambda0 (gamma = 1/2 orbit)",
                 within(last, lambda0, 0.01), false,
                 fmt("lambda0 = %.6f, %.3f%% off; ", lambda0, 100 * std::abs(last / lambda0 - 1)) +
                     trend});
  }
}

void gate_below_ball(std::vector<GateResult>& g, const DimData& dd) {
  const double l2b = radial_eigenvalue(dd.dim, 2);
  bool below = true;
  for (const auto& r : dd.rows) below = below && r.lambda2 < l2b;
  ShootingInput in;
  in.dim = dd.dim;
  in.gamma = 1e-3;
  // The gap to lambda2(B1) here is O(gamma^(p-1)), 1e-12 relative for N = 3.
  in.rel_tol = 1e-13;
  const double small = lambda_n_of_gamma(dd.dim, solve_shooting(in), 2);
  below = below && small < l2b;
  g.push_back({"6" + tag(dd.dim.N), "lambda2 < lambda2(B1); lambda2(1e-3) near lambda2(B1)",
               below && within(small, l2b, 0.01), false,
               fmt("below everywhere: %s; lambda2(1e-3) = %.6f vs %.6f", below ? "yes" : "no",
                   small, l2b)});
}

void gate_energy(std::vector<GateResult>& g, const DimData& dd) {
  const int N = dd.dim.N;
  const double lim = std::pow(sobolev_constant(N), N / 2.0) / N;
  double neh = 0.0;
  for (const auto& r : dd.rows) neh = std::max({neh, r.nehari_plus, r.nehari_minus});
  const double ratio = dd.rows.back().J_plus / lim;
  g.push_back({"7" + tag(N), "J(u+) / (S^(N/2) / N) at 1e4; Nehari residual",
               ratio >= 0.95 && ratio <= 1.05 && neh <= 1e-4, false,
               fmt("ratio %.5f (1e2: %.5f), max Nehari residual %.2e", ratio,
                   dd.rows.front().J_plus / lim, neh)});
}

void gate_bubble(std::vector<GateResult>& g, const DimData& dd) {
  const double hi = bubble_deviation(*rescale_positive_part(dd.high));
  const double lo = bubble_deviation(*rescale_positive_part(dd.low));
  g.push_back({"8" + tag(dd.dim.N), "rescaled positive part vs bubble on [0, 5]",
               hi <= 0.02 && hi < lo, false, fmt("sup gap %.3e at 1e4, %.3e at 1e2", hi, lo)});
}

void gate_node_three(std::vector<GateResult>& g, const DimData& dd) {
  const auto& p = *dd.high;
  const double rn = p.r_node();
  const double w = p.lambda() * rn * rn;
  const double t = kPi * kPi / 4.0;
  g.push_back({"9.N3", "node radius and lambda2 r^2 at gamma = 1e4",
               rn >= 0.3267 && rn <= 0.34 && within(w, t, 0.02), false,
               fmt("r_node = %.5f, lambda2 r^2 = %.5f vs %.5f", rn, w, t)});
}

void gate_six(std::vector<GateResult>& g, const DimData& dd, const Lambda0Result& l0) {
  const auto& p = *dd.high;
  const double ratio = p.M_minus() / (0.5 * p.lambda());
  const auto e = energy(p);
  const double l1 = radial_eigenvalue(dd.dim, 1);
  const double bound = kPi * kPi * kPi / 36.0 * std::pow(0.5 * l1, 3);
  const double S = sobolev_constant(6);
  const double dev = negative_part_deviation(p, *l0.u0);
  const double dev_low = negative_part_deviation(*dd.low, *l0.u0);
  const double sup0 = l0.u0->M_plus();
  const double center = l0.u0->M_plus() / l0.route_a;
  g.push_back({"10.M_minus", "M_minus / (lambda2 / 2) at gamma = 1e4", ratio >= 0.95 && ratio <= 1.05,
               false, fmt("ratio %.5f (1e2: %.5f)", ratio, dd.low->M_minus() / (0.5 * dd.low->lambda()))});
  g.push_back({"10.J_minus", "J(u-) below the annulus bound", e.J_minus <= bound, false,
               fmt("J(u-) = %.4f, bound %.4f", e.J_minus, bound)});
  g.push_back({"10.J_total", "J(u) < S^3 / 3", e.J_total < S * S * S / 3.0, false,
               fmt("J = %.4f, S^3/3 = %.4f", e.J_total, S * S * S / 3.0)});
  g.push_back({"10.u0", "sup over [0.1, 1] of |u- - u0| within 5% of sup u0", dev <= 0.05 * sup0,
               false, fmt("gap %.4f (1e2: %.4f), sup u0 = %.4f, r_node = %.4f", dev, dev_low, sup0,
                          p.r_node())});
  g.push_back({"10.center", "u0(0) / lambda0 = 1/2", center == 0.5, false,
               fmt("%.17g", center)});
}

void gate_negative_decay(std::vector<GateResult>& g, const DimData& dd) {
  const auto& r = dd.rows;
  bool dec = true;
  for (std::size_t i = r.size() - 2; i < r.size(); ++i) dec = dec && r[i].M_minus < r[i - 1].M_minus;
  const double q = r.back().M_minus / r.front().M_minus;
  g.push_back({"11" + tag(dd.dim.N), "M_minus decreasing, M_minus(1e4) < 0.1 M_minus(1e2)",
               dec && q < 0.1, false,
               fmt("ratio %.4f; M_minus = %.5g, %.5g, %.5g", q, r.front().M_minus,
                   r[r.size() / 2].M_minus, r.back().M_minus)});
}

void gate_properties(std::vector<GateResult>& g, const DimData& dd) {
  const auto& d = dd.dim;
  const int N = d.N;
  bool strict_bound = true;
  bool order = true;
  bool residual = true;
  bool determinism = true;
  double worst_halving = 0.0;
  double worst_residual = 0.0;
  for (double gamma : {1e2, 1e4}) {
    ShootingInput in;
    in.dim = d;
    in.gamma = gamma;
    const auto r = solve_shooting(in);
    const auto& tr = *r.trajectory;
    for (std::size_t z = 0; z < r.zeros.size(); ++z) {
      const double T = r.zeros[z];
      for (int i = 1; i <= 200; ++i) {
        const double t = tr.t_min() + (T - tr.t_min()) * i / 201.0;
        strict_bound = strict_bound && std::abs(tr.evaluate(t).y) < std::abs(r.slopes[z]) * (T - t);
      }
    }
    order = order && r.slopes[0] > 0 && r.slopes[1] < 0 && r.slopes[2] > 0;
    order = order && std::abs(r.slopes[0]) < std::abs(r.slopes[1]) &&
            std::abs(r.slopes[1]) < std::abs(r.slopes[2]);
    for (std::size_t i = 1; i < r.extrema.size(); ++i) {
      order = order && std::abs(r.extrema[i]) < std::abs(r.extrema[i - 1]);
    }
    order = order && r.y0 < 0 && r.zeros[1] < r.t0 && r.t0 < r.zeros[0];

    const auto again = solve_shooting(in);
    determinism = determinism && again.zeros == r.zeros && again.t0 == r.t0 && again.y0 == r.y0;

    ShootingInput half = in;
    half.rel_tol = 0.5 * in.rel_tol;
    const auto h = solve_shooting(half);
    for (double rel : {std::abs(h.zeros[0] / r.zeros[0] - 1), std::abs(h.zeros[1] / r.zeros[1] - 1),
                       std::abs(h.t0 / r.t0 - 1)}) {
      worst_halving = std::max(worst_halving, rel / in.rel_tol);
    }
  }
  for (const auto& p : {dd.low, dd.high}) {
    const double res = ode_residual(*p);
    worst_residual = std::max(worst_residual, res);
    residual = residual && res <= 1e-4;
  }
  // Rescaling identities on the positive part at moderate gamma.
  const auto& p = *dd.low;
  const double M = 2.0;
  const double e = (N - 2.0) / 2.0;
  const auto u = [&](double r) { return p.at(r).u; };
  const auto up = [&](double r) { return p.at(r).up; };
  const auto ut = [&](double y) { return std::pow(M, e) * p.at(M * y).u; };
  const auto upt = [&](double y) { return std::pow(M, e + 1) * p.at(M * y).up; };
  const double core = std::pow(p.M_plus(), -d.beta);
  std::vector<double> cuts;
  std::vector<double> cuts_t;
  for (double f : {0.1, 1.0, 10.0, 100.0}) {
    cuts.push_back(f * core);
    cuts_t.push_back(f * core / M);
  }
  const auto a = radial_norms(N, u, up, 0.0, p.r_node(), cuts);
  const auto b = radial_norms(N, ut, upt, 0.0, p.r_node() / M, cuts_t);
  const double rescale_gap = std::max({std::abs(a.dirichlet / b.dirichlet - 1),
                                   std::abs(a.lcrit / b.lcrit - 1),
                                   std::abs(a.l2 / (M * M * b.l2) - 1)});
  const std::string n = tag(N);
  g.push_back({"12.strict_bound" + n, "strict bound |y(t)| < |y'(T)| (T - t)", strict_bound, false,
               "200 samples per zero at gamma = 1e2, 1e4"});
  g.push_back({"12.order" + n, "zero, slope and extremum orderings", order, false,
               "gamma = 1e2, 1e4"});
  g.push_back({"12.rescale_gap" + n, "rescaling identities under quadrature", rescale_gap <= 1e-6, false,
               fmt("max relative gap %.2e", rescale_gap)});
  g.push_back({"12.residual" + n, "ODE residual <= 1e-4", residual, false,
               fmt("max %.2e", worst_residual)});
  g.push_back({"12.determinism" + n, "bit-identical reruns", determinism, false, ""});
  g.push_back({"12.halving" + n, "tolerance halving moves T1, T2, t0 by < 10 rel_tol",
               worst_halving < 10.0, false,
               fmt("max change %.2f rel_tol", worst_halving)});
}

void gate_seven(std::vector<GateResult>& g) {
  const auto d = DimensionParams::make(7);
  std::vector<double> l;
  for (double gamma : {1e2, 1e3, 1e4}) {
    ShootingInput in;
    in.dim = d;
    in.gamma = gamma;
    l.push_back(lambda_n_of_gamma(d, solve_shooting(in), 2));
  }
  const bool pass = l[1] < l[0] && l[2] < l[1] && l[2] < 0.2 * l[0];
  g.push_back({"5.N7", "optional: lambda2 decreasing towards 0", pass, true,
               fmt("lambda2 = %.5f, %.5f, %.5f", l[0], l[1], l[2])});
}

}  // namespace

std::vector<GateResult> run_report(const ReportOptions& opts) {
  std::vector<GateResult> g;
  std::map<int, DimData> data;
  for (int N : opts.dims) {
    if (N >= 3 && N <= 6) data.emplace(N, collect(N, opts));
  }
  std::optional<Lambda0Result> l0;
  if (data.contains(6)) l0 = lambda0_six(0.01);

  for (auto& [N, dd] : data) gate_eigen(g, dd.dim);
  for (auto& [N, dd] : data) gate_t1(g, dd);
  for (auto& [N, dd] : data) gate_slope(g, dd);
  if (data.contains(6)) gate_minimum(g, data.at(6));
  for (auto& [N, dd] : data) gate_limit(g, dd, l0 ? l0->route_a : 0.0);
  if (opts.include_optional) gate_seven(g);
  for (auto& [N, dd] : data) gate_below_ball(g, dd);
  for (auto& [N, dd] : data) gate_energy(g, dd);
  for (auto& [N, dd] : data) gate_bubble(g, dd);
  if (data.contains(3)) gate_node_three(g, data.at(3));
  if (data.contains(6)) gate_six(g, data.at(6), *l0);
  for (auto& [N, dd] : data) {
    if (N <= 5) gate_negative_decay(g, dd);
  }
  for (auto& [N, dd] : data) gate_properties(g, dd);
  return g;
}

nlohmann::ordered_json report_to_json(const std::vector<GateResult>& gates) {
  auto arr = nlohmann::ordered_json::array();
  int failed = 0;
  for (const auto& x : gates) {
    if (!x.passed && !x.informational) ++failed;
    arr.push_back({{"id", x.id},
                   {"title", x.title},
                   {"passed", x.passed},
                   {"informational", x.informational},
                   {"observed", x.observed}});
  }
  return {{"gates", arr},
          {"total", static_cast<int>(gates.size())},
          {"failed", failed}};
}

std::string report_to_text(const std::vector<GateResult>& gates) {
  std::ostringstream os;
  int failed = 0;
  for (const auto& x : gates) {
    const char* verdict = x.passed ? "PASS" : (x.informational ? "INFO" : "FAIL");
    if (!x.passed && !x.informational) ++failed;
    os << verdict << "  " << x.id << "  " << x.title;
    if (!x.observed.empty()) os << "  [" << x.observed << "]";
    os << '\n';
  }
  os << failed << " of " << gates.size() << " gates failed\n";
  return os.str();
}

}  // namespace bnrad::cli
