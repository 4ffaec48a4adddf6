#pragma once

// Energies of reconstructed profiles, asymptotic-law fits over gamma sweeps,
// and the N = 6 studies of the negative part.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bnrad/transform.hpp"

namespace bnrad {

/// Integrals over one nodal region, each including the factor omega_{N-1}.
struct PartIntegrals {
  double dirichlet = 0.0;  ///< int |grad u|^2
  double l2 = 0.0;         ///< int u^2
  double lcrit = 0.0;      ///< int |u|^(2*)
};

struct EnergyReport {
  double lambda = 0.0;
  PartIntegrals plus;
  PartIntegrals minus;
  double J_plus = 0.0;
  double J_minus = 0.0;
  double J_total = 0.0;
  /// |D - lambda L2 - C| / D for each part (0 for an empty part).
  double nehari_residual_plus = 0.0;
  double nehari_residual_minus = 0.0;
};

/// J of one part: D/2 - lambda L2/2 - C/2*.
double part_energy(const DimensionParams& dim, double lambda, const PartIntegrals& v);

/// Energy from the Emden-Fowler orbit. The integrals are taken in x = ln t
/// with a Gauss-Legendre rule on every integrator step (each step split into
/// `refinement` equal pieces), plus closed-form tails beyond t_start.
EnergyReport energy(const RadialProfile& profile, int refinement = 1);

/// Same quantities by adaptive quadrature directly in r; slower, used to
/// validate energy() at moderate gamma.
EnergyReport energy_radial_quadrature(const RadialProfile& profile, double rel_tol = 1e-10);

/// omega_{N-1} int_a^b g(r) r^(N-1) dr for the three integrands built from
/// u and u'. Breakpoints (ascending, inside (a, b)) split the interval.
PartIntegrals radial_norms(int N, const std::function<double(double)>& u,
                           const std::function<double(double)>& up, double a, double b,
                           const std::vector<double>& breakpoints = {},
                           double rel_tol = 1e-10);

enum class FitModel { power, log, constant };

std::string to_string(FitModel m);

/// power:    value = prefactor * gamma^exponent, least squares in logs.
/// log:      value / log(gamma) = prefactor + exponent / log(gamma); the
///           prefactor is the limit of value / log(gamma).
/// constant: prefactor is the mean, max_deviation the largest distance
///           from it; exponent is 0.
struct FitReport {
  FitModel model = FitModel::power;
  double exponent = 0.0;
  double prefactor = 0.0;
  double rms_residual = 0.0;
  double max_deviation = 0.0;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  int n_points = 0;
};

FitReport fit_power_law(const std::vector<std::pair<double, double>>& points, FitModel model);

/// Log-spaced gammas from gamma_min to gamma_max inclusive with the given
/// density per decade.
std::vector<double> log_spaced_gammas(double gamma_min, double gamma_max, int per_decade);

struct SlopeLawReport {
  FitReport fit;      ///< constant model on gamma * y'(T_1)
  double target = 0;  ///< (k-1)^(1/(k-2))
  double value_at_max = 0.0;
  double relative_error = 0.0;  ///< at the largest gamma
  std::vector<std::pair<double, double>> points;
};

SlopeLawReport slope_law_check(const DimensionParams& dim, const std::vector<double>& gammas);

struct MinimumLawReport {
  FitReport y0_fit;     ///< constant model on y0
  FitReport t0_fit;     ///< constant model on t0 / (2 gamma / 9)^(2/3)
  double y0_at_max = 0.0;
  double t0_ratio_at_max = 0.0;
  std::vector<double> gammas;
  std::vector<double> y0;
  std::vector<double> t0_ratio;
};

/// Always on the N = 6 orbit; needs at least four increasing gammas.
MinimumLawReport t0_y0_asymptotics(const std::vector<double>& gammas);

struct Lambda0Result {
  double route_a = 0.0;  ///< 16 / sqrt(T_1(1/2))
  double route_b = 0.0;  ///< extrapolated lambda_2 at large gamma
  double relative_gap = 0.0;
  std::vector<std::pair<double, double>> route_b_samples;  ///< (gamma, lambda_2)
  std::shared_ptr<const RadialProfile> u0;  ///< positive solution at route_a
};

/// Both routes for the N = 6 limit value. Throws NumericError when they
/// differ by more than max(tolerance, 1%).
Lambda0Result lambda0_six(double tolerance = 0.01);

/// max over r in [r_lo, 1] of |max(-u, 0) - u0|.
double negative_part_deviation(const RadialProfile& profile, const RadialProfile& u0,
                               double r_lo = 0.1, int samples = 901);

/// max over rho in [0, rho_max] of |u~ - U|, U the unit-height bubble.
double bubble_deviation(const RescaledProfile& rescaled, double rho_max = 5.0,
                        int samples = 1001);

/// One solved gamma with everything the tables need.
struct SweepRow {
  double gamma = 0.0;
  double lambda2 = 0.0;
  double T1 = 0.0;
  double T2 = 0.0;
  double t0 = 0.0;
  double y0 = 0.0;
  double slope1 = 0.0;  ///< y'(T_1)
  double r_node = 0.0;
  double s_min = 0.0;
  double M_plus = 0.0;
  double M_minus = 0.0;
  double J_plus = 0.0;
  double J_minus = 0.0;
  double nehari_plus = 0.0;
  double nehari_minus = 0.0;
};

struct SweepOptions {
  double rel_tol = 1e-10;
  bool with_energy = true;
};

SweepRow sweep_point(const DimensionParams& dim, double gamma, const SweepOptions& opts = {});
std::vector<SweepRow> sweep(const DimensionParams& dim, const std::vector<double>& gammas,
                            const SweepOptions& opts = {});

struct NegativePartRow {
  double gamma = 0.0;
  double lambda2 = 0.0;
  double M_minus = 0.0;
  double ratio_half_lambda = 0.0;  ///< M_minus / (lambda2 / 2)
  std::optional<double> deviation_u0;  ///< N = 6 only
};

struct NegativePartStudy {
  std::vector<NegativePartRow> rows;
  bool strictly_decreasing_tail = false;  ///< last three rows
  double decay_ratio = 0.0;               ///< M_minus(last) / M_minus(first)
  std::optional<double> u0_sup;
};

/// Requires at least three increasing gammas.
NegativePartStudy negative_part_study(const DimensionParams& dim,
                                      const std::vector<double>& gammas);

struct Lambda2Study {
  std::vector<std::pair<double, double>> rows;  ///< (gamma, lambda2)
  double target = 0.0;  ///< conjectured limit; 0 for N >= 7
  std::string target_name;
  double lambda1 = 0.0;
  double lambda2_ball = 0.0;
  /// |lambda2(last) - target| / target; for N >= 7 (target 0) it is
  /// lambda2(last) / lambda2(first) instead.
  double relative_error_at_max = 0.0;
  bool above_lambda1_everywhere = false;
  bool below_lambda1_on_tail = false;  ///< last three rows
  bool below_lambda2_ball_everywhere = false;
  bool decreasing = false;
};

Lambda2Study lambda2_limit_study(const DimensionParams& dim, const std::vector<double>& gammas);

}  // namespace bnrad
