#pragma once

// Terminal-value problem for the Emden-Fowler equation
//
//   y'' + t^(-k) (y + |y|^(p-1) y) = 0,   y(t) -> gamma  as t -> infinity,
//
// solved backward from a large starting time with event detection for the
// zeros of y (T_1 > T_2 > ...) and for its critical points.

#include <memory>
#include <span>
#include <vector>

#include "bnrad/specfun.hpp"

namespace bnrad {

struct ShootingInput {
  DimensionParams dim;
  double gamma = 1.0;
  double rel_tol = 1e-10;
  /// Non-positive selects the default 1e-14 * min(gamma, 1/gamma).
  double abs_tol = 0.0;
  int n_zeros = 3;
  double tail_eps = 1e-10;

  /// Throws ConfigError when the input cannot be solved.
  void validate() const;
  double effective_abs_tol() const;
};

/// Dense solution on [t_min, t_start]. Breakpoints are the accepted steps of
/// the integrator, stored in descending t.
class Trajectory {
 public:
  struct Node {
    double t;
    double y;
    double yp;  ///< dy/dt
  };
  struct Value {
    double y;
    double yp;
  };

  Trajectory(const DimensionParams& dim, std::vector<Node> nodes);

  /// Dense evaluation; throws DomainError outside [t_min, t_start].
  Value evaluate(double t) const;

  double t_start() const { return nodes_.front().t; }
  double t_min() const { return nodes_.back().t; }
  std::span<const Node> nodes() const { return nodes_; }

 private:
  Value interpolate(std::size_t seg, double t) const;

  DimensionParams dim_;
  std::vector<Node> nodes_;
};

struct ShootingResult {
  ShootingInput input;
  double t_start = 0.0;
  std::vector<double> zeros;   ///< T_1 > T_2 > ... > T_{n_zeros}
  std::vector<double> slopes;  ///< y'(T_i)
  /// All critical points met before integration stopped, descending.
  std::vector<double> critical_points;
  std::vector<double> extrema;  ///< y at each critical point
  double t0 = 0.0;              ///< largest critical point
  double y0 = 0.0;              ///< y(t0), the global minimum value
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
  std::shared_ptr<const Trajectory> trajectory;
};

/// f(y) = y + |y|^(p-1) y.
double ef_nonlinearity(const DimensionParams& dim, double y);

/// Start of backward integration: the smallest t at which the one-term tail
/// correction f(gamma) t^(2-k) / ((k-1)(k-2)) is at most tail_eps * gamma,
/// but never below ten times the largest zero of alpha.
double tail_start(const DimensionParams& dim, double gamma, double tail_eps);

ShootingResult solve_shooting(const ShootingInput& input);

/// Convenience overload with default tolerances.
ShootingResult solve_shooting(const DimensionParams& dim, double gamma, int n_zeros = 3);

}  // namespace bnrad
