#include "bnrad/shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "bnrad/errors.hpp"

namespace bnrad {

// The integration runs in x = -log t so that it advances forward while t
// decreases. With w = t y' the system reads
//
//   dy/dx = -w,   dw/dx = t^(2-k) f(y) - w,
//
// which keeps both components O(gamma)-scaled over the whole range of t.

namespace {

using State = std::array<double, 2>;

// Largest supported gamma. In low dimensions the collapse towards the first
// zero amplifies integration error roughly like gamma^2, so the cap is lower.
constexpr double kMaxGammaLowDim = 1e5;
constexpr double kMaxGamma = 1e6;
constexpr double kLargestLogStart = 690.0;
constexpr std::size_t kMaxSteps = 2'000'000;
constexpr double kMaxStep = 0.1;
constexpr double kEventTol = 1e-13;

// Dormand-Prince 5(4).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct System {
  DimensionParams dim;

  double f(double y) const { return ef_nonlinearity(dim, y); }
  double fprime(double y) const { return 1.0 + dim.p * std::pow(std::abs(y), dim.p - 1.0); }

  // t^(2-k) at x = -log t.
  double weight(double x) const { return std::exp((dim.k - 2.0) * x); }

  State rhs(double x, const State& z) const { return {-z[1], weight(x) * f(z[0]) - z[1]}; }

  // Second x-derivatives, for the quintic Hermite dense output.
  State rhs2(double x, const State& z, const State& dz) const {
    const double g = weight(x);
    const double wxx = g * ((dim.k - 2.0) * f(z[0]) + fprime(z[0]) * dz[0]) - dz[1];
    return {-dz[1], wxx};
  }
};

// Node of the x-parametrised solution with first and second derivatives.
struct XNode {
  double x;
  State z;
  State dz;
  State ddz;
};

// Quintic Hermite interpolation of component c between two nodes.
double hermite5(const XNode& a, const XNode& b, int c, double x) {
  const double h = b.x - a.x;
  const double s = (x - a.x) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
  const double h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
  const double h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
  const double h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
  const double h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
  const double h5 = 0.5 * (s3 - 2.0 * s4 + s5);
  return a.z[c] * h0 + h * a.dz[c] * h1 + h * h * a.ddz[c] * h2 + b.z[c] * h3 +
         h * b.dz[c] * h4 + h * h * b.ddz[c] * h5;
}

// Root of component c of the interpolant inside (a.x, b.x); the endpoint
// values have strictly opposite signs. Illinois variant of regula falsi with a
// bisection fallback whenever the bracket fails to shrink.
double refine_event(const XNode& a, const XNode& b, int c) {
  double lo = a.x, hi = b.x;
  double flo = a.z[c], fhi = b.z[c];
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= kEventTol * std::max(1.0, std::abs(lo))) break;
    double m = (lo * fhi - hi * flo) / (fhi - flo);
    const double width = hi - lo;
    if (!(m > lo && m < hi) || it % 8 == 7) m = 0.5 * (lo + hi);
    const double fm = hermite5(a, b, c, m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = m;
      flo = fm;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = m;
      fhi = fm;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo > 0.75 * width) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = hermite5(a, b, c, mid);
      if (fmid == 0.0) return mid;
      if ((fmid > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
        fhi = fmid;
      }
      side = 0;
    }
  }
  return 0.5 * (lo + hi);
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double ef_nonlinearity(const DimensionParams& dim, double y) {
  if (dim.p == 2.0) return y + std::abs(y) * y;
  return y + std::pow(std::abs(y), dim.p - 1.0) * y;
}

void ShootingInput::validate() const {
  if (dim.N < 3) throw ConfigError("dimension must be at least 3");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive and finite");
  if (n_zeros < 2) throw ConfigError("n_zeros must be at least 2");
  if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) throw ConfigError("rel_tol must lie in (0, 1e-4]");
  if (abs_tol > 1e-4) throw ConfigError("abs_tol must lie in (0, 1e-4]");
  if (!(tail_eps > 0.0)) throw ConfigError("tail_eps must be positive");
  const double cap = dim.N <= 4 ? kMaxGammaLowDim : kMaxGamma;
  if (gamma > cap) {
    std::ostringstream os;
    os << "gamma above " << cap << " is not supported for N = " << dim.N;
    throw ConfigError(os.str());
  }
}

double ShootingInput::effective_abs_tol() const {
  return abs_tol > 0.0 ? abs_tol : 1e-14 * std::min(gamma, 1.0 / gamma);
}

double tail_start(const DimensionParams& dim, double gamma, double tail_eps) {
  if (!(gamma > 0.0)) throw DomainError("tail_start: gamma must be positive");
  if (!(tail_eps > 0.0)) throw DomainError("tail_start: tail_eps must be positive");
  const double k = dim.k;
  const double log_t = (std::log(ef_nonlinearity(dim, gamma)) -
                        std::log((k - 1.0) * (k - 2.0) * tail_eps * gamma)) /
                       (k - 2.0);
  if (!std::isfinite(log_t) || log_t > kLargestLogStart) {
    std::ostringstream os;
    os << "tail_start: starting time exp(" << log_t << ") overflows (k = " << k << ")";
    throw ConfigError(os.str());
  }
  const double floor_t = 10.0 * alpha_zero(dim, 1);
  return std::max(std::exp(log_t), floor_t);
}

Trajectory::Trajectory(const DimensionParams& dim, std::vector<Node> nodes)
    : dim_(dim), nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw DomainError("Trajectory needs at least two nodes");
}

Trajectory::Value Trajectory::evaluate(double t) const {
  if (!(t >= t_min() && t <= t_start())) {
    std::ostringstream os;
    os << "Trajectory::evaluate: t = " << t << " outside [" << t_min() << ", " << t_start() << "]";
    throw DomainError(os.str());
  }
  // First node with node.t <= t (nodes are descending).
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t,
                                   [](const Node& n, double v) { return n.t > v; });
  if (it->t == t) return {it->y, it->yp};
  const auto seg = static_cast<std::size_t>(std::distance(nodes_.begin(), it)) - 1;
  return interpolate(seg, t);
}

Trajectory::Value Trajectory::interpolate(std::size_t seg, double t) const {
  const System sys{dim_};
  const auto make = [&](const Node& n) {
    XNode xn;
    xn.x = -std::log(n.t);
    xn.z = {n.y, n.t * n.yp};
    xn.dz = sys.rhs(xn.x, xn.z);
    xn.ddz = sys.rhs2(xn.x, xn.z, xn.dz);
    return xn;
  };
  const XNode a = make(nodes_[seg]);
  const XNode b = make(nodes_[seg + 1]);
  const double x = -std::log(t);
  return {hermite5(a, b, 0, x), hermite5(a, b, 1, x) / t};
}

ShootingResult solve_shooting(const ShootingInput& input) {
  input.validate();
  const DimensionParams& dim = input.dim;
  const System sys{dim};
  const double k = dim.k;
  const double gamma = input.gamma;
  const double rtol = input.rel_tol;
  const double atol = input.effective_abs_tol();

  ShootingResult res;
  res.input = input;
  res.t_start = tail_start(dim, gamma, input.tail_eps);

  // One-term asymptotics of the terminal condition.
  const double ts = res.t_start;
  const double fg = sys.f(gamma);
  double x = -std::log(ts);
  State z = {gamma - fg * std::pow(ts, 2.0 - k) / ((k - 1.0) * (k - 2.0)),
             fg * std::pow(ts, 2.0 - k) / (k - 1.0)};

  std::vector<Trajectory::Node> nodes;
  const auto push_node = [&](double xx, const State& zz) {
    const double t = std::exp(-xx);
    nodes.push_back({t, zz[0], zz[1] / t});
  };
  push_node(x, z);

  State k1 = sys.rhs(x, z);
  XNode prev{x, z, k1, sys.rhs2(x, z, k1)};
  int last_sign_y = sign_of(z[0]);
  int last_sign_w = sign_of(z[1]);

  double h = 1e-2;
  double err_old = 1e-4;
  bool rejected_last = false;
  const double x_floor = -std::log(1e-12);  // give up below t = 1e-12

  const auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "solve_shooting (N = " << dim.N << ", gamma = " << gamma << "): " << why
       << "; last good state t = " << std::exp(-x) << ", y = " << z[0] << ", y' = "
       << z[1] * std::exp(x) << ", zeros found " << res.zeros.size();
    throw NumericError(os.str());
  };

  while (true) {
    if (res.steps_accepted + res.steps_rejected > kMaxSteps) fail("step budget exhausted");
    if (x > x_floor) fail("events not found before step underflow");
    h = std::min(h, kMaxStep);
    if (h < 1e-14 * std::max(1.0, std::abs(x))) fail("step size underflow (rejection cascade)");

    const auto axpy = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State out = z;
      for (const auto& [c, kk] : terms) {
        out[0] += h * c * (*kk)[0];
        out[1] += h * c * (*kk)[1];
      }
      return out;
    };
    const State k2 = sys.rhs(x + c2 * h, axpy({{a21, &k1}}));
    const State k3 = sys.rhs(x + c3 * h, axpy({{a31, &k1}, {a32, &k2}}));
    const State k4 = sys.rhs(x + c4 * h, axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = sys.rhs(x + c5 * h, axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        sys.rhs(x + h, axpy({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State znew = axpy({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = sys.rhs(x + h, znew);

    double err = 0.0;
    for (int c = 0; c < 2; ++c) {
      const double e = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] + e6 * k6[c] +
                            e7 * k7[c]);
      const double sc = atol + rtol * std::max(std::abs(z[c]), std::abs(znew[c]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / 2.0);
    if (!std::isfinite(err)) {
      h *= 0.2;
      ++res.steps_rejected;
      rejected_last = true;
      continue;
    }

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      ++res.steps_rejected;
      rejected_last = true;
      continue;
    }

    // Accepted.
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_old, 0.4 / 5.0);
    fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 10.0);
    err_old = std::max(err, 1e-4);
    rejected_last = false;
    ++res.steps_accepted;

    const double xnew = x + h;
    const XNode cur{xnew, znew, k7, sys.rhs2(xnew, znew, k7)};
    push_node(xnew, znew);

    bool stop = false;
    const int sy = sign_of(znew[0]);
    if (sy != 0 && sy != last_sign_y && static_cast<int>(res.zeros.size()) < input.n_zeros) {
      const double xr = prev.z[0] == 0.0 ? prev.x : refine_event(prev, cur, 0);
      const double t = std::exp(-xr);
      res.zeros.push_back(t);
      res.slopes.push_back(hermite5(prev, cur, 1, xr) / t);
    }
    if (sy != 0) last_sign_y = sy;

    const int sw = sign_of(znew[1]);
    if (sw != 0 && sw != last_sign_w) {
      const double xr = prev.z[1] == 0.0 ? prev.x : refine_event(prev, cur, 1);
      res.critical_points.push_back(std::exp(-xr));
      res.extrema.push_back(hermite5(prev, cur, 0, xr));
      if (static_cast<int>(res.zeros.size()) == input.n_zeros &&
          res.critical_points.back() < res.zeros.back()) {
        stop = true;
      }
    }
    if (sw != 0) last_sign_w = sw;

    x = xnew;
    z = znew;
    k1 = k7;
    prev = cur;
    h *= fac;
    if (stop) break;
  }

  res.t0 = res.critical_points.front();
  res.y0 = res.extrema.front();
  res.trajectory = std::make_shared<const Trajectory>(dim, std::move(nodes));
  return res;
}

ShootingResult solve_shooting(const DimensionParams& dim, double gamma, int n_zeros) {
  ShootingInput in;
  in.dim = dim;
  in.gamma = gamma;
  in.n_zeros = n_zeros;
  return solve_shooting(in);
}

}  // namespace bnrad
