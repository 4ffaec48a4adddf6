#pragma once

#include <functional>

namespace bnrad {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< estimated absolute error
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b]; b may be
/// +infinity. The interval with the largest error estimate is bisected until
/// the total estimate meets max(abs_tol, rel_tol * |value|) or reaches
/// round-off. Throws NumericError when no piece deeper than `max_depth`
/// bisections can be made and the tolerance is still missed.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-12, double abs_tol = 0.0,
                           unsigned max_depth = 20);

}  // namespace bnrad
