#include "bnrad/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "bnrad/errors.hpp"

namespace bnrad {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Piece {
  double a;
  double b;
  double value;
  double error;
  double l1;
  int depth;
  bool operator<(const Piece& o) const { return error < o.error; }
};

// One 7/15 rule on [a, b]. The rule is applied on [-1, 1] and rescaled
// here: the error estimate Boost returns from its own interval mapping is
// not multiplied by the half-width.
Piece apply_rule(const std::function<double(double)>& f, double a, double b, int depth) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double err = 0.0;
  double l1 = 0.0;
  const double v =
      Rule::integrate([&](double x) { return f(std::clamp(mid + half * x, a, b)); }, -1.0, 1.0, 0, 0.0, &err, &l1);
  return {a, b, half * v, half * err, half * l1, depth};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double abs_tol, unsigned max_depth) {
  QuadratureResult r;
  if (a == b) return r;
  if (std::isinf(b) && std::isfinite(a)) {
    // x = a + s / (1 - s), s in [0, 1)
    return integrate(
        [&](double s) {
          if (s >= 1.0) return 0.0;
          const double w = 1.0 / (1.0 - s);
          return f(a + s * w) * w * w;
        },
        0.0, 1.0, rel_tol, abs_tol, max_depth);
  }
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate: only the upper bound may be infinite");
  }

  std::priority_queue<Piece> heap;
  heap.push(apply_rule(f, a, b, 0));
  double value = heap.top().value;
  double error = heap.top().error;
  double l1 = heap.top().l1;
  std::vector<Piece> done;
  const auto target = [&] { return std::max(abs_tol, rel_tol * std::abs(value)); };
  constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();
  while (!heap.empty() && error > target() && error > kRoundoff * l1) {
    Piece p = heap.top();
    heap.pop();
    if (p.depth >= static_cast<int>(max_depth)) {
      done.push_back(p);
      continue;
    }
    const double mid = 0.5 * (p.a + p.b);
    const Piece left = apply_rule(f, p.a, mid, p.depth + 1);
    const Piece right = apply_rule(f, mid, p.b, p.depth + 1);
    value += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    l1 += left.l1 + right.l1 - p.l1;
    heap.push(left);
    heap.push(right);
  }
  // Resum to shed the drift of the running updates.
  r.value = 0.0;
  r.error = 0.0;
  l1 = 0.0;
  for (; !heap.empty(); heap.pop()) {
    r.value += heap.top().value;
    r.error += heap.top().error;
    l1 += heap.top().l1;
  }
  for (const auto& p : done) {
    r.value += p.value;
    r.error += p.error;
    l1 += p.l1;
  }
  if (!std::isfinite(r.value)) throw NumericError("quadrature produced a non-finite value");
  if (r.error > rel_tol * std::abs(r.value) + abs_tol && r.error > 1e3 * rel_tol * l1) {
    std::ostringstream os;
    os << "quadrature did not converge on [" << a << ", " << b << "]: value " << r.value
       << ", error estimate " << r.error;
    throw NumericError(os.str());
  }
  return r;
}

}  // namespace bnrad
