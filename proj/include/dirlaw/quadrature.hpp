#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace dirlaw::quad {

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  int levels = 0;
};

/// Double-exponential (tanh-sinh) quadrature of f over [a, b].
///
/// The integrand is called as f(x, dist_left, dist_right) where the two
/// distances to the interval ends are computed without cancellation, so
/// integrands with algebraic endpoint singularities can evaluate
/// (b - x)^(c - 1) accurately even when x rounds to b.
///
/// Refinement halves the step until two successive estimates differ by at
/// most tol, or max_level is reached.
template <typename F>
Result tanh_sinh(F&& f, double a, double b, double tol, int max_level = 9) {
  Result out;
  if (!(b > a)) return out;
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  constexpr double kTMax = 6.5;
  const double half = 0.5 * (b - a);
  const double width = b - a;

  // Sum of w(t) * f over nodes t = offset + j * step for j >= 0, both signs.
  auto sweep = [&](double offset, double step) {
    double sum = 0.0;
    for (double t = offset; t <= kTMax; t += step) {
      const double s = kHalfPi * std::sinh(t);
      const double cs = std::cosh(s);
      const double w = kHalfPi * std::cosh(t) / (cs * cs);
      // 1 - tanh(s) = 2 / (1 + e^{2s})
      const double near = half * 2.0 / (1.0 + std::exp(2.0 * s));
      if (near <= std::numeric_limits<double>::min()) break;
      const double far = width - near;
      if (t == 0.0) {
        sum += w * f(a + half, half, half);
        continue;
      }
      const double term = w * (f(a + near, near, far) + f(b - near, far, near));
      sum += term;
      if (t > 1.0 && std::abs(term) <= 1e-20 * std::abs(sum)) break;
    }
    return sum;
  };

  double step = 1.0;
  double sum = sweep(0.0, step);
  double estimate = half * step * sum;
  for (int level = 1; level <= max_level; ++level) {
    step *= 0.5;
    sum += sweep(step, 2.0 * step);
    const double next = half * step * sum;
    out.error_estimate = std::abs(next - estimate);
    out.levels = level;
    estimate = next;
    if (level >= 3 && out.error_estimate <= tol) break;
  }
  out.value = estimate;
  return out;
}

}  // namespace dirlaw::quad
