// Acceptance run: one verdict line per criterion, details indented below.
// Oracles are computed here from the standard library and closed forms; the
// library is only used to produce the quantities under test.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "bnrad/analysis.hpp"

using namespace bnrad;
using std::numbers::pi;

namespace {

struct Verdict {
  bool ok = true;
  std::vector<std::string> notes;
  void need(bool cond, const char* fmt, auto... args) {
    char buf[320];
    std::snprintf(buf, sizeof buf, fmt, args...);
    notes.push_back(std::string(cond ? "ok    " : "MISS  ") + buf);
    ok = ok && cond;
  }
};

int failures = 0;

void report(int id, const char* title, const Verdict& v) {
  std::printf("%s  criterion %2d  %s\n", v.ok ? "PASS" : "FAIL", id, title);
  for (const auto& n : v.notes) std::printf("        %s\n", n.c_str());
  std::fflush(stdout);
  if (!v.ok) ++failures;
}

double bessel_zero(double nu, int n) {
  int seen = 0;
  const double h = 0.005;
  for (double a = h;; a += h) {
    if (std::cyl_bessel_j(nu, a) * std::cyl_bessel_j(nu, a + h) < 0 && ++seen == n) {
      double lo = a;
      double hi = a + h;
      for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (lo + hi);
        (std::cyl_bessel_j(nu, lo) * std::cyl_bessel_j(nu, m) <= 0 ? hi : lo) = m;
      }
      return 0.5 * (lo + hi);
    }
  }
}

double sobolev(int N) {
  return N * (N - 2) * pi * std::pow(std::tgamma(N / 2.0) / std::tgamma(N), 2.0 / N);
}

double unit_bubble(int N, double rho) {
  return std::pow(1.0 + rho * rho / (N * (N - 2.0)), -(N - 2.0) / 2.0);
}

struct Point {
  double gamma;
  std::shared_ptr<const ShootingResult> orbit;
  std::shared_ptr<const RadialProfile> profile;
  EnergyReport e;
  double lambda2;
};

Point solve_point(int N, double gamma, double rel_tol = 1e-10) {
  ShootingInput in;
  in.dim = DimensionParams::make(N);
  in.gamma = gamma;
  in.rel_tol = rel_tol;
  Point p;
  p.gamma = gamma;
  p.orbit = std::make_shared<const ShootingResult>(solve_shooting(in));
  p.profile = build_radial_profile(p.orbit);
  p.e = energy(*p.profile);
  p.lambda2 = p.profile->lambda();
  return p;
}

// Sweep over [1e2, 1e4], 12 points per decade.
std::map<int, std::vector<Point>> sweeps;

const std::vector<Point>& sweep_of(int N) {
  auto it = sweeps.find(N);
  if (it != sweeps.end()) return it->second;
  std::vector<Point> pts;
  for (int i = 0; i <= 24; ++i) pts.push_back(solve_point(N, std::pow(10.0, 2.0 + i / 12.0)));
  return sweeps.emplace(N, std::move(pts)).first->second;
}

const Point& at(int N, double gamma) {
  for (const auto& p : sweep_of(N)) {
    if (std::abs(p.gamma / gamma - 1) < 1e-12) return p;
  }
  std::abort();
}

double loglog_slope(const std::vector<Point>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (const auto& p : pts) {
    const double x = std::log(p.gamma);
    const double y = std::log(p.orbit->zeros[0]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double lambda0_route_a() {
  const auto r = solve_shooting(DimensionParams::make(6), 0.5);
  return 16.0 / std::sqrt(r.zeros[0]);
}

void criterion1() {
  Verdict v;
  for (int N = 3; N <= 6; ++N) {
    const auto d = DimensionParams::make(N);
    for (int n = 1; n <= 2; ++n) {
      const double j = bessel_zero(d.nu, n);
      const double got = radial_eigenvalue(d, n);
      const double gap = std::abs(got / (j * j) - 1);
      v.need(gap <= 1e-8, "N=%d n=%d: %.12f vs j^2 = %.12f (rel %.1e)", N, n, got, j * j, gap);
      if (N == 3) {
        const double exact = n * n * pi * pi;
        v.need(std::abs(got / exact - 1) <= 1e-8, "N=3 n=%d: vs n^2 pi^2 rel %.1e", n,
               std::abs(got / exact - 1));
      }
    }
  }
  report(1, "radial eigenvalues are squared Bessel zeros", v);
}

void criterion2() {
  Verdict v;
  const double e5 = loglog_slope(sweep_of(5));
  v.need(std::abs(e5 - 2.0 / 3.0) <= 0.05, "N=5 exponent %.4f (target 0.6667 +- 0.05)", e5);
  const double e6 = loglog_slope(sweep_of(6));
  v.need(std::abs(e6 - 1.0) <= 0.05, "N=6 exponent %.4f (target 1 +- 0.05)", e6);
  const auto& p4 = at(4, 1e4);
  const double r4 = p4.orbit->zeros[0] / (2 * std::log(1e4));
  v.need(r4 >= 0.9 && r4 <= 1.1, "N=4 T1/(2 log gamma) at 1e4 = %.4f (trend %.4f at 1e2, %.4f at 1e3)", r4,
         at(4, 1e2).orbit->zeros[0] / (2 * std::log(1e2)), at(4, 1e3).orbit->zeros[0] / (2 * std::log(1e3)));
  double lo = INFINITY;
  double hi = 0;
  for (const auto& p : sweep_of(3)) {
    lo = std::min(lo, p.orbit->zeros[0]);
    hi = std::max(hi, p.orbit->zeros[0]);
  }
  v.need(hi / lo <= 2.0, "N=3 T1 range [%.6f, %.6f], ratio %.4f", lo, hi, hi / lo);
  report(2, "growth of the first zero", v);
}

void criterion3() {
  Verdict v;
  for (int N = 3; N <= 6; ++N) {
    const double k = DimensionParams::make(N).k;
    const double target = std::pow(k - 1, 1 / (k - 2));
    const auto val = [&](double g) { return g * at(N, g).orbit->slopes[0]; };
    const double got = val(1e4);
    v.need(std::abs(got / target - 1) <= 0.02, "N=%d gamma y'(T1) = %.5f vs %.5f (%.2f%%; 1e2: %.5f, 1e3: %.5f)",
           N, got, target, 100 * std::abs(got / target - 1), val(1e2), val(1e3));
  }
  report(3, "slope at the first zero", v);
}

void criterion4() {
  Verdict v;
  const auto ratio = [](double g) { return at(6, g).orbit->t0 / std::pow(2 * g / 9, 2.0 / 3.0); };
  const double y0 = at(6, 1e4).orbit->y0;
  v.need(y0 >= -0.51 && y0 <= -0.49, "y0(1e4) = %.5f (1e2: %.5f, 1e3: %.5f)", y0, at(6, 1e2).orbit->y0,
         at(6, 1e3).orbit->y0);
  v.need(ratio(1e4) >= 0.95 && ratio(1e4) <= 1.05, "t0 ratio at 1e4 = %.5f (1e2: %.5f, 1e3: %.5f)",
         ratio(1e4), ratio(1e2), ratio(1e3));
  report(4, "minimum of the six dimensional orbit", v);
}

void criterion5() {
  Verdict v;
  const double l3 = at(3, 1e4).lambda2;
  v.need(std::abs(l3 / (9 * pi * pi / 4) - 1) <= 0.02, "N=3 lambda2(1e4) = %.5f vs 9 pi^2/4 = %.5f", l3,
         9 * pi * pi / 4);
  const double j4 = bessel_zero(1.0, 1);
  const double lam1_4 = j4 * j4;
  bool above = true;
  for (const auto& p : sweep_of(4)) above = above && p.lambda2 > lam1_4;
  const double l4 = at(4, 1e4).lambda2;
  v.need(std::abs(l4 / lam1_4 - 1) <= 0.02 && above,
         "N=4 lambda2(1e4) = %.5f vs %.5f (%.2f%%), above at every point: %s", l4, lam1_4,
         100 * std::abs(l4 / lam1_4 - 1), above ? "yes" : "no");
  const double j5 = bessel_zero(1.5, 1);
  const double lam1_5 = j5 * j5;
  const auto& s5 = sweep_of(5);
  bool below_tail = true;
  for (std::size_t i = s5.size() - 3; i < s5.size(); ++i) below_tail = below_tail && s5[i].lambda2 < lam1_5;
  const double l5 = at(5, 1e4).lambda2;
  v.need(std::abs(l5 / lam1_5 - 1) <= 0.02 && below_tail,
         "N=5 lambda2(1e4) = %.5f vs %.5f (%.2f%%), below on tail: %s", l5, lam1_5,
         100 * std::abs(l5 / lam1_5 - 1), below_tail ? "yes" : "no");
  const double l0 = lambda0_route_a();
  const double l6 = at(6, 1e4).lambda2;
  v.need(std::abs(l6 / l0 - 1) <= 0.01, "N=6 lambda2(1e4) = %.5f vs lambda0 = %.5f (%.3f%%)", l6, l0,
         100 * std::abs(l6 / l0 - 1));
  std::vector<double> l7;
  for (double g : {1e2, 1e3, 1e4}) l7.push_back(solve_point(7, g).lambda2);
  const bool opt = l7[1] < l7[0] && l7[2] < l7[1] && l7[2] < 0.2 * l7[0];
  v.notes.push_back(std::string(opt ? "ok    " : "info  ") + "optional N=7: lambda2 = " +
                    std::to_string(l7[0]) + ", " + std::to_string(l7[1]) + ", " + std::to_string(l7[2]) +
                    " (not counted)");
  report(5, "limits of lambda2", v);
}

void criterion6() {
  Verdict v;
  for (int N = 3; N <= 6; ++N) {
    const double j = bessel_zero((N - 2) / 2.0, 2);
    const double ball = j * j;
    bool below = true;
    for (const auto& p : sweep_of(N)) below = below && p.lambda2 < ball;
    // Near-linear orbit: the gap is O(gamma^(p-1)), so solve it tightly.
    const double small = solve_point(N, 1e-3, 1e-13).lambda2;
    below = below && small < ball;
    v.need(below && std::abs(small / ball - 1) <= 0.01,
           "N=%d below lambda2(B1) = %.5f everywhere: %s; lambda2(1e-3) = %.5f", N, ball, below ? "yes" : "no",
           small);
  }
  report(6, "lambda2 below the second ball eigenvalue", v);
}

void criterion7() {
  Verdict v;
  for (int N = 3; N <= 6; ++N) {
    const double ref = std::pow(sobolev(N), N / 2.0) / N;
    const double r = at(N, 1e4).e.J_plus / ref;
    double worst = 0;
    for (const auto& p : sweep_of(N)) {
      worst = std::max({worst, p.e.nehari_residual_plus, p.e.nehari_residual_minus});
    }
    v.need(r >= 0.95 && r <= 1.05 && worst <= 1e-4, "N=%d J(u+)/(S^(N/2)/N) = %.5f, worst Nehari residual %.1e",
           N, r, worst);
  }
  report(7, "energy of the positive part", v);
}

double bubble_gap(const RescaledProfile& rp, int N) {
  double worst = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double rho = 5.0 * i / 1000;
    const double u = rho <= rp.sigma() ? rp.at(rho) : 0.0;
    worst = std::max(worst, std::abs(u - unit_bubble(N, rho)));
  }
  return worst;
}

void criterion8() {
  Verdict v;
  for (int N = 3; N <= 6; ++N) {
    const double hi = bubble_gap(*rescale_positive_part(at(N, 1e4).profile), N);
    const double lo = bubble_gap(*rescale_positive_part(at(N, 1e2).profile), N);
    v.need(hi <= 0.02 && hi < lo, "N=%d sup gap %.3e at 1e4, %.3e at 1e2", N, hi, lo);
  }
  report(8, "rescaled positive part approaches the bubble", v);
}

void criterion9() {
  Verdict v;
  const auto& p = at(3, 1e4);
  const double rn = p.profile->r_node();
  v.need(rn >= 0.3267 && rn <= 0.34, "r_node = %.5f", rn);
  const double q = p.lambda2 * rn * rn;
  v.need(std::abs(q / (pi * pi / 4) - 1) <= 0.02, "lambda2 r_node^2 = %.5f vs %.5f", q, pi * pi / 4);
  report(9, "node radius in three dimensions", v);
}

void criterion10() {
  Verdict v;
  const auto& p = at(6, 1e4);
  const auto ratio = [](const Point& q) { return q.profile->M_minus() / (q.lambda2 / 2); };
  v.need(ratio(p) >= 0.95 && ratio(p) <= 1.05, "M_minus/(lambda2/2) = %.5f (1e2: %.5f, 1e3: %.5f)", ratio(p),
         ratio(at(6, 1e2)), ratio(at(6, 1e3)));
  const double j = bessel_zero(2.0, 1);
  const double bound = pi * pi * pi / 36 * std::pow(j * j / 2, 3);
  v.need(p.e.J_minus <= bound, "J(u-) = %.4f <= %.4f", p.e.J_minus, bound);
  const double s3 = std::pow(sobolev(6), 3) / 3;
  v.need(p.e.J_total < s3, "J(u) = %.4f < S^3/3 = %.4f", p.e.J_total, s3);

  const auto o = std::make_shared<const ShootingResult>(solve_shooting(DimensionParams::make(6), 0.5));
  const auto u0 = build_radial_profile(o, 1);
  const double l0 = 16.0 / std::sqrt(o->zeros[0]);
  double sup = 0;
  double gap = 0;
  for (int i = 0; i <= 900; ++i) {
    const double r = 0.1 + 0.9 * i / 900;
    const double w = u0->at(r).u;
    sup = std::max(sup, w);
    gap = std::max(gap, std::abs(std::max(-p.profile->at(r).u, 0.0) - w));
  }
  v.need(gap <= 0.05 * sup, "sup |u- - u0| on [0.1, 1] = %.4f, 5%% of sup u0 = %.4f (r_node = %.4f)", gap,
         0.05 * sup, p.profile->r_node());
  const double um = std::max(-p.profile->at(0.5).u, 0.0);
  v.notes.push_back("info  pointwise at r = 0.5: u- = " + std::to_string(um) + ", u0 = " +
                    std::to_string(u0->at(0.5).u) + " (not counted)");
  const double c = u0->at(0.0).u / l0;
  v.need(std::abs(c - 0.5) <= 1e-12, "u0(0)/lambda0 = %.15f", c);
  report(10, "negative part in six dimensions", v);
}

void criterion11() {
  Verdict v;
  for (int N = 3; N <= 5; ++N) {
    const auto& s = sweep_of(N);
    bool dec = true;
    for (std::size_t i = s.size() - 3; i < s.size(); ++i) {
      dec = dec && s[i].profile->M_minus() < s[i - 1].profile->M_minus();
    }
    const double r = at(N, 1e4).profile->M_minus() / at(N, 1e2).profile->M_minus();
    v.need(dec && r < 0.1, "N=%d decreasing on tail: %s, M_minus(1e4)/M_minus(1e2) = %.4f", N,
           dec ? "yes" : "no", r);
  }
  report(11, "negative part vanishes for N = 3, 4, 5", v);
}

void criterion12() {
  Verdict v;
  for (int N = 3; N <= 6; ++N) {
    bool bound = true;
    bool order = true;
    bool same = true;
    double halving = 0;
    double resid = 0;
    for (double g : {1e2, 1e4}) {
      const auto& p = at(N, g);
      const auto& r = *p.orbit;
      const auto& tr = *r.trajectory;
      for (std::size_t z = 0; z < r.zeros.size(); ++z) {
        for (int i = 1; i <= 200; ++i) {
          const double t = tr.t_min() + (r.zeros[z] - tr.t_min()) * i / 201.0;
          bound = bound && std::abs(tr.evaluate(t).y) < std::abs(r.slopes[z]) * (r.zeros[z] - t);
        }
      }
      order = order && r.zeros.size() == 3 && r.zeros[0] > r.zeros[1] && r.zeros[1] > r.zeros[2];
      order = order && r.slopes[0] > 0 && r.slopes[1] < 0 && r.slopes[2] > 0;
      order = order && std::abs(r.slopes[0]) < std::abs(r.slopes[1]) && std::abs(r.slopes[1]) < std::abs(r.slopes[2]);
      for (std::size_t i = 1; i < r.extrema.size(); ++i) {
        order = order && std::abs(r.extrema[i]) < std::abs(r.extrema[i - 1]) && r.extrema[i] * r.extrema[i - 1] < 0;
      }
      order = order && r.zeros[1] < r.t0 && r.t0 < r.zeros[0];
      resid = std::max(resid, ode_residual(*p.profile));

      const auto again = solve_point(N, g);
      same = same && again.orbit->zeros == r.zeros && again.orbit->t0 == r.t0 && again.e.J_plus == p.e.J_plus;
      const auto half = solve_point(N, g, 0.5e-10);
      for (double d : {half.orbit->zeros[0] / r.zeros[0], half.orbit->zeros[1] / r.zeros[1], half.orbit->t0 / r.t0}) {
        halving = std::max(halving, std::abs(d - 1) / 1e-10);
      }
    }
    // Rescaling identities on the positive part at gamma = 1e2.
    const auto& pr = *at(N, 1e2).profile;
    const double M = 2.5;
    const double e = (N - 2) / 2.0;
    const double rn = pr.r_node();
    const double core = std::pow(pr.M_plus(), -2.0 / (N - 2));
    std::vector<double> cuts;
    std::vector<double> cuts_scaled;
    for (double f : {0.1, 1.0, 10.0}) {
      if (f * core < rn) {
        cuts.push_back(f * core);
        cuts_scaled.push_back(f * core / M);
      }
    }
    const auto a = radial_norms(N, [&](double r) { return pr.at(r).u; }, [&](double r) { return pr.at(r).up; },
                                0.0, rn, cuts);
    const auto b = radial_norms(
        N, [&](double y) { return std::pow(M, e) * pr.at(M * y).u; },
        [&](double y) { return std::pow(M, e + 1) * pr.at(M * y).up; }, 0.0, rn / M, cuts_scaled);
    const double l31 = std::max({std::abs(b.dirichlet / a.dirichlet - 1), std::abs(b.lcrit / a.lcrit - 1),
                                 std::abs(M * M * b.l2 / a.l2 - 1)});
    v.need(bound, "N=%d strict bound behind each zero (200 points per zero, gamma 1e2 and 1e4)", N);
    v.need(order, "N=%d orderings of zeros, slopes and extrema", N);
    v.need(l31 <= 1e-6, "N=%d rescaling identities, max rel gap %.1e", N, l31);
    v.need(resid <= 1e-4, "N=%d ODE residual %.1e", N, resid);
    v.need(same, "N=%d bit-identical rerun", N);
    v.need(halving < 10, "N=%d halving rel_tol moves T1, T2, t0 by %.1f rel_tol (limit 10)", N, halving);
  }
  report(12, "property suites", v);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  criterion12();
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
