#include "bnrad/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "bnrad/errors.hpp"
#include "bnrad/quadrature.hpp"

namespace bnrad {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double gamma_positive(double x) {
  // x >= 0.5
  const double z = x - 1.0;
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * kPi) * half * (half * std::exp(-t)) * a;
}

constexpr double kSeriesLimit = 20.0;
constexpr double kBesselMaxArg = 60.0;

// Power series evaluated in extended precision; the alternating terms reach
// roughly e^s / (2 pi s) in magnitude, so double would lose too many digits
// towards the upper end of the series range.
double bessel_series(double nu, double s) {
  if (s == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  using ld = long double;
  const ld half = static_cast<ld>(s) / 2;
  const ld q = -half * half;
  ld term = std::pow(half, static_cast<ld>(nu)) / static_cast<ld>(gamma_fn(nu + 1.0));
  ld sum = term;
  for (int j = 1; j <= 200; ++j) {
    term *= q / (static_cast<ld>(j) * (static_cast<ld>(j) + static_cast<ld>(nu)));
    sum += term;
    if (std::abs(term) < 1e-18L * std::abs(sum)) break;
  }
  return static_cast<double>(sum);
}

// Hankel asymptotic expansion, summed until the terms stop decreasing.
double bessel_hankel(double nu, double s) {
  const double mu = 4.0 * nu * nu;
  double p = 0.0;
  double q = 0.0;
  double term = 1.0;  // a_k(nu) / s^k
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    if (std::abs(term) > prev) break;
    // a_k contributes to P for even k and to Q for odd k, with sign (-1)^(k/2).
    const int m = k / 2;
    const double signed_term = (m % 2 == 0) ? term : -term;
    if (k % 2 == 0) {
      p += signed_term;
    } else {
      q += signed_term;
    }
    if (std::abs(term) < 1e-17 * std::max(std::abs(p), 1e-300)) break;
    prev = std::abs(term);
    const double odd = 2.0 * k + 1.0;
    term *= (mu - odd * odd) / ((k + 1.0) * 8.0 * s);
  }
  const double chi = s - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * s)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

DimensionParams DimensionParams::make(int N) {
  if (N < 3) {
    throw DomainError("dimension must be at least 3, got " + std::to_string(N));
  }
  DimensionParams d;
  const double n = N;
  d.N = N;
  d.p = (n + 2.0) / (n - 2.0);
  d.two_star = 2.0 * n / (n - 2.0);
  d.k = 2.0 * (n - 1.0) / (n - 2.0);
  d.nu = (n - 2.0) / 2.0;
  d.beta = 2.0 / (n - 2.0);
  return d;
}

double gamma_fn(double x) {
  if (std::isnan(x)) throw DomainError("gamma_fn: NaN argument");
  if (x <= 0.0 && x == std::floor(x)) {
    std::ostringstream os;
    os << "gamma_fn: pole at " << x;
    throw DomainError(os.str());
  }
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_positive(1.0 - x));
  return gamma_positive(x);
}

double bessel_j(double nu, double s) {
  if (!(nu >= 0.0) || !(s >= 0.0)) throw DomainError("bessel_j: requires nu >= 0 and s >= 0");
  if (s > kBesselMaxArg) {
    std::ostringstream os;
    os << "bessel_j: argument " << s << " exceeds supported range [0, " << kBesselMaxArg << "]";
    throw DomainError(os.str());
  }
  if (s <= kSeriesLimit || nu * nu > s) return bessel_series(nu, s);
  return bessel_hankel(nu, s);
}

double alpha_fn(const DimensionParams& dim, double t) {
  if (!(t > 0.0)) throw DomainError("alpha_fn: t must be positive");
  const double nu = dim.nu;
  const double amp = std::pow(nu, -nu) * gamma_fn(nu + 1.0);
  const double s = 2.0 * nu * std::pow(t, -1.0 / (2.0 * nu));
  return amp * std::sqrt(t) * bessel_j(nu, s);
}

double alpha_zero(const DimensionParams& dim, int n) {
  if (n < 1) throw DomainError("alpha_zero: n must be >= 1");
  const double nu = dim.nu;
  // Zeros of alpha are the images of Bessel zeros under s = 2 nu t^(-1/(2 nu)).
  // The interval s in (0, (n + nu + 1) pi] contains the first n positive zeros
  // of J_nu, so the t-bracket below holds tau_1 ... tau_n.
  const double s_hi = (n + nu + 1.0) * kPi;
  if (s_hi > kBesselMaxArg) throw NumericError("alpha_zero: zero index too large for bracket");
  const double to_t = 2.0 * nu;
  const auto t_of_s = [&](double s) { return std::pow(to_t / s, 2.0 * nu); };
  const double t_hi = t_of_s(0.5);  // alpha > 0 beyond this point
  const double t_lo = t_of_s(s_hi);

  const int samples = 400 * (n + 2);
  const double log_hi = std::log(t_hi);
  const double log_lo = std::log(t_lo);
  double prev_t = t_hi;
  double prev_v = alpha_fn(dim, prev_t);
  int found = 0;
  for (int i = 1; i <= samples; ++i) {
    const double lt = log_hi + (log_lo - log_hi) * static_cast<double>(i) / samples;
    const double t = std::exp(lt);
    const double v = alpha_fn(dim, t);
    if ((prev_v > 0.0 && v < 0.0) || (prev_v < 0.0 && v > 0.0)) {
      if (++found == n) {
        double a = t;  // lower end
        double b = prev_t;
        double fa = v;
        for (int it = 0; it < 200 && (b - a) > 1e-13 * b; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = alpha_fn(dim, m);
          if (fm == 0.0) return m;
          if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        return 0.5 * (a + b);
      }
    }
    prev_t = t;
    prev_v = v;
  }
  std::ostringstream os;
  os << "alpha_zero: located " << found << " of " << n << " zeros in [" << t_lo << ", " << t_hi
     << "] (N = " << dim.N << ")";
  throw NumericError(os.str());
}

double radial_eigenvalue(const DimensionParams& dim, int n) {
  const double tau = alpha_zero(dim, n);
  const double m = dim.N - 2.0;
  return m * m * std::pow(tau, -2.0 / m);
}

double sobolev_constant(int N) {
  if (N < 3) throw DomainError("sobolev_constant: N must be >= 3");
  const double n = N;
  return kPi * n * (n - 2.0) * std::pow(gamma_fn(n / 2.0) / gamma_fn(n), 2.0 / n);
}

double sobolev_constant_quadrature(int N) {
  const auto dim = DimensionParams::make(N);
  const auto bubble = BubbleSpec::normalized(N);
  const double w = sphere_area(N);
  // Substitute r = x / (1 - x) to map (0, inf) onto (0, 1).
  const auto radial = [&](auto&& g) {
    return integrate(
               [&](double x) {
                 if (x >= 1.0) return 0.0;
                 const double r = x / (1.0 - x);
                 const double jac = 1.0 / ((1.0 - x) * (1.0 - x));
                 return g(r) * std::pow(r, N - 1) * jac;
               },
               0.0, 1.0, 1e-13)
        .value;
  };
  const double grad = w * radial([&](double r) {
    const double d = bubble_derivative(bubble, r);
    return d * d;
  });
  const double crit = w * radial([&](double r) {
    return std::pow(bubble_eval(bubble, r), dim.two_star);
  });
  return grad / std::pow(crit, 2.0 / dim.two_star);
}

double sphere_area(int N) {
  return 2.0 * std::pow(kPi, N / 2.0) / gamma_fn(N / 2.0);
}

BubbleSpec BubbleSpec::normalized(int N) {
  return BubbleSpec{N, std::sqrt(static_cast<double>(N) * (N - 2))};
}

double bubble_eval(const BubbleSpec& spec, double radius) {
  if (!(spec.mu > 0.0)) throw DomainError("bubble_eval: mu must be positive");
  const double n = spec.N;
  const double mu2 = spec.mu * spec.mu;
  return std::pow(n * (n - 2.0) * mu2, (n - 2.0) / 4.0) /
         std::pow(mu2 + radius * radius, (n - 2.0) / 2.0);
}

double bubble_derivative(const BubbleSpec& spec, double radius) {
  const double n = spec.N;
  const double mu2 = spec.mu * spec.mu;
  return -(n - 2.0) * radius * bubble_eval(spec, radius) / (mu2 + radius * radius);
}

PrefactorCandidates zero_prefactor_candidates(double k) {
  if (!(k > 2.0 && k < 3.0)) throw DomainError("zero_prefactor_candidates: requires 2 < k < 3");
  const double lead = std::pow(k - 1.0, (k - 3.0) / (k - 2.0));
  const double tail = gamma_fn((k - 1.0) / (k - 2.0)) / gamma_fn(2.0 / (k - 2.0));
  PrefactorCandidates c;
  c.split = lead * (gamma_fn(3.0 - k) / (k - 2.0)) * tail;
  c.grouped = lead * gamma_fn((3.0 - k) / (k - 2.0)) * tail;
  return c;
}

}  // namespace bnrad
