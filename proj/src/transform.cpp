#include "bnrad/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnrad/errors.hpp"

namespace bnrad {

namespace {

// Log-spaced points in [lo, hi], endpoints included.
void append_log_grid(std::vector<double>& out, double lo, double hi, int n) {
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i + 1 < n; ++i) out.push_back(std::exp(a + (b - a) * i / (n - 1)));
  out.push_back(hi);
}

void append_uniform_grid(std::vector<double>& out, double lo, double hi, int n) {
  for (int i = 0; i + 1 < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  out.push_back(hi);
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    if (out.empty() || x - out.back() > 1e-12 * std::abs(x)) out.push_back(x);
  }
  v = std::move(out);
}

// u'' at samples[i] from the derivative of the polynomial interpolating u'
// over up to five neighbouring samples. Differencing u itself is avoided:
// near the origin u is flat to many digits and its differences cancel.
double second_derivative(const std::vector<ProfileSample>& s, std::size_t i) {
  const std::size_t n = s.size();
  const std::size_t width = std::min<std::size_t>(5, n);
  std::size_t lo = i >= width / 2 ? i - width / 2 : 0;
  lo = std::min(lo, n - width);
  const double xi = s[i].r;
  double acc = 0.0;
  for (std::size_t j = lo; j < lo + width; ++j) {
    double w = 0.0;
    if (j == i) {
      for (std::size_t m = lo; m < lo + width; ++m) {
        if (m != i) w += 1.0 / (xi - s[m].r);
      }
    } else {
      double num = 1.0;
      double den = 1.0;
      for (std::size_t m = lo; m < lo + width; ++m) {
        if (m == j) continue;
        den *= s[j].r - s[m].r;
        if (m != i) num *= xi - s[m].r;
      }
      w = num / den;
    }
    acc += w * s[j].up;
  }
  return acc;
}

}  // namespace

double lambda_n_of_gamma(const DimensionParams& dim, const ShootingResult& result, int n) {
  if (n < 1 || n > static_cast<int>(result.zeros.size())) {
    std::ostringstream os;
    os << "lambda_n_of_gamma: n = " << n << " but only " << result.zeros.size()
       << " zeros were captured";
    throw DomainError(os.str());
  }
  const double m = dim.N - 2.0;
  return m * m * std::pow(result.zeros[n - 1], -2.0 / m);
}

RadialProfile::RadialProfile(std::shared_ptr<const ShootingResult> orbit, int n_nodal,
                             int mesh_points)
    : orbit_(std::move(orbit)), n_nodal_(n_nodal) {
  if (!orbit_) throw DomainError("RadialProfile: null orbit");
  if (mesh_points < 10) throw DomainError("RadialProfile: mesh_points must be at least 10");
  const auto& o = *orbit_;
  const auto& d = o.input.dim;
  lambda_ = lambda_n_of_gamma(d, o, n_nodal);
  const double m = d.N - 2.0;
  amplitude_ = std::pow(lambda_, m / 4.0);
  t_boundary_ = o.zeros[n_nodal - 1];
  M_plus_ = amplitude_ * o.input.gamma;
  if (n_nodal >= 2) {
    r_node_ = std::pow(t_boundary_ / o.zeros[0], 1.0 / m);
    s_min_ = std::pow(t_boundary_ / o.t0, 1.0 / m);
    M_minus_ = amplitude_ * std::abs(o.y0);
  }
  r_eps_ = std::pow(t_boundary_ / o.t_start, 1.0 / m);

  // Log-graded mesh; points too close to the refinement window or to the
  // node and minimum radii are dropped so that neighbouring spacings stay
  // comparable for the second-difference residual.
  const int n_refine = n_nodal >= 2 ? mesh_points / 5 : 0;
  const int n_log = mesh_points - n_refine;
  std::vector<double> radii;
  append_log_grid(radii, r_eps_, 1.0, n_log);
  const double q = std::pow(1.0 / r_eps_, 1.0 / (n_log - 1)) - 1.0;
  const auto drop_near = [&](double lo, double hi) {
    std::erase_if(radii, [&](double x) { return x > lo && x < hi && x != 1.0 && x != r_eps_; });
  };
  if (n_refine > 0) {
    const double lo = std::max(r_eps_, 0.9 * r_node_);
    const double hi = std::min(1.0, 1.1 * r_node_);
    const double h = (hi - lo) / (n_refine - 1);
    drop_near(lo - 0.5 * q * lo, hi + 0.5 * q * hi);
    append_uniform_grid(radii, lo, hi, n_refine);
    for (double p : {r_node_, s_min_}) {
      const double local = (p >= lo && p <= hi) ? h : q * p;
      drop_near(p - 0.5 * local, p + 0.5 * local);
      radii.push_back(p);
    }
  }
  sort_unique(radii);
  samples_.reserve(radii.size());
  for (double r : radii) samples_.push_back(at(r));
}

double RadialProfile::t_of_r(double r) const {
  return t_boundary_ * std::pow(r, -(dim().N - 2.0));
}

double RadialProfile::r_of_t(double t) const {
  return std::pow(t_boundary_ / t, 1.0 / (dim().N - 2.0));
}

ProfileSample RadialProfile::at(double r) const {
  if (!(r >= 0.0 && r <= 1.0 + 1e-14)) {
    std::ostringstream os;
    os << "RadialProfile::at: radius " << r << " outside [0, 1]";
    throw DomainError(os.str());
  }
  r = std::min(r, 1.0);
  if (r == 0.0) return {0.0, M_plus_, 0.0};
  const auto& d = dim();
  const double m = d.N - 2.0;
  const auto& traj = *orbit_->trajectory;
  double t = t_of_r(r);
  double y = 0.0;
  double yp = 0.0;
  if (t > traj.t_start() * (1.0 + 1e-12)) {
    if (!std::isfinite(t)) return {r, M_plus_, 0.0};
    const double g = orbit_->input.gamma;
    const double fg = ef_nonlinearity(d, g);
    const double k = d.k;
    y = g - fg * std::pow(t, 2.0 - k) / ((k - 1.0) * (k - 2.0));
    yp = fg * std::pow(t, 1.0 - k) / (k - 1.0);
  } else {
    t = std::clamp(t, traj.t_min(), traj.t_start());
    const auto v = traj.evaluate(t);
    y = v.y;
    yp = v.yp;
  }
  const double u = amplitude_ * y;
  const double up = -amplitude_ * m * t_boundary_ * std::pow(r, -(d.N - 1.0)) * yp;
  return {r, u, up};
}

RescaledProfile::RescaledProfile(std::shared_ptr<const RadialProfile> profile, int mesh_points)
    : profile_(std::move(profile)) {
  if (!profile_) throw DomainError("RescaledProfile: null profile");
  if (profile_->M_plus() <= 0.0) throw DomainError("RescaledProfile: u(0) must be positive");
  scale_ = std::pow(profile_->M_plus(), profile_->dim().beta);
  sigma_ = scale_ * profile_->r_node();
  std::vector<double> rho;
  const double knee = std::min(sigma_, 10.0);
  append_uniform_grid(rho, 0.0, knee, mesh_points / 2);
  if (sigma_ > knee) append_log_grid(rho, knee, sigma_, mesh_points / 2);
  sort_unique(rho);
  samples_.reserve(rho.size());
  for (double x : rho) samples_.emplace_back(x, at(x));
}

double RescaledProfile::at(double rho) const {
  if (!(rho >= 0.0 && rho <= sigma_ * (1.0 + 1e-12))) {
    std::ostringstream os;
    os << "RescaledProfile::at: rho " << rho << " outside [0, " << sigma_ << "]";
    throw DomainError(os.str());
  }
  if (rho == 0.0) return 1.0;
  const double r = std::min(rho / scale_, 1.0);
  return profile_->at(r).u / profile_->M_plus();
}

std::shared_ptr<const RadialProfile> build_radial_profile(
    std::shared_ptr<const ShootingResult> result, int n_nodal, int mesh_points) {
  return std::make_shared<const RadialProfile>(std::move(result), n_nodal, mesh_points);
}

std::shared_ptr<const RescaledProfile> rescale_positive_part(
    std::shared_ptr<const RadialProfile> profile) {
  if (profile && profile->n_nodal() < 2) {
    throw DomainError("rescale_positive_part: profile must have two nodal regions");
  }
  return std::make_shared<const RescaledProfile>(std::move(profile));
}

double ode_residual(const DimensionParams& dim, double lambda, double M_plus,
                    const std::vector<ProfileSample>& samples) {
  if (samples.size() < 3) throw DomainError("ode_residual: need at least three samples");
  double worst = 0.0;
  const double floor_scale = lambda * M_plus;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const auto& s = samples[i];
    const double upp = second_derivative(samples, i);
    const double t_drift = (dim.N - 1.0) / s.r * s.up;
    const double t_lin = lambda * s.u;
    const double t_pow = std::pow(std::abs(s.u), dim.p - 1.0) * s.u;
    const double res = std::abs(upp + t_drift + t_lin + t_pow);
    const double scale = std::max(
        floor_scale, std::abs(upp) + std::abs(t_drift) + std::abs(t_lin) + std::abs(t_pow));
    if (scale > 0.0) worst = std::max(worst, res / scale);
  }
  return worst;
}

double ode_residual(const RadialProfile& profile) {
  return ode_residual(profile.dim(), profile.lambda(), profile.M_plus(), profile.samples());
}

}  // namespace bnrad
