#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dirlaw/errors.hpp"
#include "dirlaw/rational.hpp"

namespace dirlaw {

/// One evaluated grid point of a deviation report.
struct DeviationRow {
  std::vector<double> u;
  double empirical = 0.0;
  double limit = 0.0;
  double deviation = 0.0;
};

struct DeviationReport {
  std::string kind;  // integers | polys | perms
  double scale = 0.0;  // x, or n for polys/perms
  int k = 2;
  std::string model = "uniform";
  double grid_step = 0.0;
  int bins = 0;  // 0 when the exact path was used
  std::vector<DeviationRow> rows;
  double sup_dev = 0.0;
  double scaled_sup_dev = 0.0;

  void add(std::vector<double> u, double empirical, double limit) {
    const double dev = empirical - limit;
    rows.push_back({std::move(u), empirical, limit, dev});
    sup_dev = std::max(sup_dev, std::abs(dev));
  }
};

/// Rect grid points u = step * (j_1, ..., j_{k-1}) with every j_i >= 1 and
/// sum j_i <= G - 1 where G = 1/step, i.e. the points strictly inside the
/// region u_i > 0, sum u < 1. Coordinates are exact rationals j / G.
struct RectGrid {
  int k = 2;
  std::int64_t denominator = 1;  // G
  std::vector<std::vector<std::int64_t>> points;  // numerators j_i

  std::vector<double> as_double(std::size_t idx) const {
    std::vector<double> u;
    for (auto j : points[idx]) u.push_back(static_cast<double>(j) / static_cast<double>(denominator));
    return u;
  }

  std::vector<Rational> as_rational(std::size_t idx) const {
    std::vector<Rational> u;
    for (auto j : points[idx]) u.push_back(make_rational(static_cast<long>(j), static_cast<long>(denominator)));
    return u;
  }
};

/// Accepts steps whose reciprocal is an integer (0.05, 0.1, 0.25, 0.01, ...).
inline RectGrid make_rect_grid(int k, double step) {
  detail::require(k >= 2, "grid needs k >= 2");
  detail::require(step >= 0.01 - 1e-15 && step <= 0.5 + 1e-15, "grid step must lie in [0.01, 0.5]");
  const double inv = 1.0 / step;
  const auto g = static_cast<std::int64_t>(std::llround(inv));
  detail::require(std::abs(inv - static_cast<double>(g)) <= 1e-9 * inv, "grid step must be 1/G for an integer G");
  RectGrid grid;
  grid.k = k;
  grid.denominator = g;
  std::vector<std::int64_t> cur(static_cast<std::size_t>(k - 1), 1);
  auto rec = [&](auto&& self, std::size_t pos, std::int64_t used) -> void {
    if (pos == cur.size()) {
      grid.points.push_back(cur);
      return;
    }
    const std::size_t rest = cur.size() - pos - 1;
    for (std::int64_t j = 1; used + j + static_cast<std::int64_t>(rest) <= g - 1; ++j) {
      cur[pos] = j;
      self(self, pos + 1, used + j);
    }
  };
  rec(rec, 0, 0);
  return grid;
}

}  // namespace dirlaw
