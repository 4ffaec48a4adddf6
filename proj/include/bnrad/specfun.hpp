#pragma once

// Special functions used throughout the library: Gamma, Bessel J of the first
// kind, the linearised Emden-Fowler solution alpha, radial Dirichlet
// eigenvalues of the unit ball, the Sobolev constant and the standard bubble.
//
// Everything here is a pure function of its arguments.

#include <utility>

namespace bnrad {

/// Exponents derived from the space dimension N >= 3.
struct DimensionParams {
  int N = 3;
  double p = 5.0;         ///< critical power (N+2)/(N-2)
  double two_star = 6.0;  ///< critical Sobolev exponent 2N/(N-2)
  double k = 4.0;         ///< Emden-Fowler exponent 2(N-1)/(N-2)
  double nu = 0.5;        ///< Bessel order (N-2)/2
  double beta = 2.0;      ///< rescaling exponent 2/(N-2)

  /// Throws DomainError for N < 3.
  static DimensionParams make(int N);
};

/// Gamma function. Poles (x = 0, -1, -2, ...) raise DomainError.
double gamma_fn(double x);

/// Bessel function of the first kind J_nu(s) for nu >= 0, 0 <= s <= 60.
double bessel_j(double nu, double s);

/// Solution of a'' + t^(-k) a = 0 with a(t) -> 1 as t -> infinity:
/// a(t) = A_nu sqrt(t) J_nu(2 nu t^(-1/(2 nu))), A_nu = nu^(-nu) Gamma(nu+1).
double alpha_fn(const DimensionParams& dim, double t);

/// n-th zero of alpha counted from the largest one (tau_1 > tau_2 > ...).
double alpha_zero(const DimensionParams& dim, int n);

/// n-th radial Dirichlet eigenvalue of -Laplace on the unit ball,
/// (N-2)^2 tau_n^(-2/(N-2)).
double radial_eigenvalue(const DimensionParams& dim, int n);

/// Best constant of the embedding D^{1,2}(R^N) -> L^{2*}(R^N), closed form.
double sobolev_constant(int N);

/// The same constant computed as the Rayleigh quotient of the bubble by
/// radial quadrature. Used as a cross-check of the closed form.
double sobolev_constant_quadrature(int N);

/// Surface measure of the unit sphere in R^N, 2 pi^(N/2) / Gamma(N/2).
double sphere_area(int N);

struct BubbleSpec {
  int N = 3;
  double mu = 1.0;

  /// The bubble with U(0) = 1, i.e. mu = sqrt(N(N-2)).
  static BubbleSpec normalized(int N);
};

/// U_{0,mu}(r) = [N(N-2) mu^2]^((N-2)/4) / [mu^2 + r^2]^((N-2)/2).
double bubble_eval(const BubbleSpec& spec, double radius);

/// Radial derivative dU/dr.
double bubble_derivative(const BubbleSpec& spec, double radius);

/// The two readings of the prefactor A(k) in T_1(gamma) ~ A(k) gamma^(6-2k),
/// valid for 2 < k < 3. `split` reads the numerator as Gamma(3-k)/(k-2), while
/// `grouped` reads it as Gamma((3-k)/(k-2)).
struct PrefactorCandidates {
  double split = 0.0;
  double grouped = 0.0;
};
PrefactorCandidates zero_prefactor_candidates(double k);

}  // namespace bnrad
