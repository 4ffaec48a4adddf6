#pragma once

// Correspondence between Emden-Fowler orbits and radial solutions of
//
//   u'' + (N-1)/r u' + lambda u + |u|^(2*-2) u = 0  on (0, 1),  u(1) = 0,
//
// through t = T_n r^-(N-2), u(r) = lambda^((N-2)/4) y(t), with
// lambda = (N-2)^2 T_n^(-2/(N-2)) so that r = 1 is mapped onto the zero T_n.

#include <memory>
#include <vector>

#include "bnrad/shooting.hpp"

namespace bnrad {

struct ProfileSample {
  double r;
  double u;
  double up;  ///< du/dr
};

/// Radial solution rebuilt from a shooting orbit. With n_nodal = 1 the
/// profile is the positive solution on the whole ball; in that case r_node and
/// s_min are both 1 and M_minus is 0.
class RadialProfile {
 public:
  RadialProfile(std::shared_ptr<const ShootingResult> orbit, int n_nodal, int mesh_points);

  const DimensionParams& dim() const { return orbit_->input.dim; }
  double gamma() const { return orbit_->input.gamma; }
  int n_nodal() const { return n_nodal_; }
  double lambda() const { return lambda_; }
  /// lambda^((N-2)/4), the factor between y and u.
  double amplitude() const { return amplitude_; }
  /// Zero of y mapped to r = 1.
  double boundary_zero() const { return t_boundary_; }
  double r_node() const { return r_node_; }
  double s_min() const { return s_min_; }
  double M_plus() const { return M_plus_; }
  double M_minus() const { return M_minus_; }
  /// Smallest sampled radius, the image of the integration start.
  double r_eps() const { return r_eps_; }
  const std::vector<ProfileSample>& samples() const { return samples_; }
  const ShootingResult& orbit() const { return *orbit_; }

  /// Dense evaluation on [0, 1]. Below r_eps the one-term tail of the
  /// terminal condition is used; u(0) is lambda^((N-2)/4) gamma exactly.
  ProfileSample at(double r) const;

  /// Map between r and the Emden-Fowler variable t.
  double t_of_r(double r) const;
  double r_of_t(double t) const;

 private:
  std::shared_ptr<const ShootingResult> orbit_;
  int n_nodal_;
  double lambda_ = 0.0;
  double amplitude_ = 0.0;
  double t_boundary_ = 0.0;
  double r_node_ = 1.0;
  double s_min_ = 1.0;
  double M_plus_ = 0.0;
  double M_minus_ = 0.0;
  double r_eps_ = 0.0;
  std::vector<ProfileSample> samples_;
};

/// Positive part rescaled to unit height: u~(rho) = u(rho / M^beta) / M on
/// [0, sigma], sigma = M^beta r_node.
class RescaledProfile {
 public:
  explicit RescaledProfile(std::shared_ptr<const RadialProfile> profile, int mesh_points = 2000);

  double sigma() const { return sigma_; }
  double scale() const { return scale_; }  ///< M_plus^beta
  const DimensionParams& dim() const { return profile_->dim(); }
  /// (rho, u~) pairs covering [0, sigma].
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }
  double at(double rho) const;

 private:
  std::shared_ptr<const RadialProfile> profile_;
  double sigma_ = 0.0;
  double scale_ = 1.0;
  std::vector<std::pair<double, double>> samples_;
};

/// (N-2)^2 T_n^(-2/(N-2)). Throws DomainError when fewer than n zeros exist.
double lambda_n_of_gamma(const DimensionParams& dim, const ShootingResult& result, int n);

std::shared_ptr<const RadialProfile> build_radial_profile(
    std::shared_ptr<const ShootingResult> result, int n_nodal = 2, int mesh_points = 2000);

std::shared_ptr<const RescaledProfile> rescale_positive_part(
    std::shared_ptr<const RadialProfile> profile);

/// Finite-difference residual of the radial equation at interior samples,
/// with u'' taken from an interpolant of the sampled u'. Each residual is divided by max(lambda * M_plus, sum of the magnitudes of
/// the equation's four terms at that radius); the maximum is returned.
double ode_residual(const DimensionParams& dim, double lambda, double M_plus,
                    const std::vector<ProfileSample>& samples);
double ode_residual(const RadialProfile& profile);

}  // namespace bnrad
