#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dirlaw/dirichlet.hpp"
#include "dirlaw/errors.hpp"
#include "dirlaw/rational.hpp"
#include "dirlaw/report.hpp"

namespace dirlaw::perms {

/// Conjugacy class of S_n: (cycle length, multiplicity) pairs, lengths ascending.
struct CycleType {
  int n = 0;
  std::vector<std::pair<int, int>> partition;

  int cycles() const {
    int c = 0;
    for (auto [len, mult] : partition) c += mult;
    return c;
  }

  /// n! / prod(l^c_l c_l!)
  BigInt class_size() const {
    BigInt den = 1;
    for (auto [len, mult] : partition) den *= ipow(BigInt(len), static_cast<unsigned long>(mult)) * factorial(static_cast<unsigned long>(mult));
    return factorial(static_cast<unsigned long>(n)) / den;
  }
};

/// Visits every cycle type of S_n (integer partitions of n).
template <class Visitor>
void for_each_cycle_type(int n, Visitor&& visit) {
  detail::require(n >= 0, "for_each_cycle_type needs n >= 0");
  CycleType ct{n, {}};
  // parts chosen in descending length, stored ascending on visit
  std::vector<std::pair<int, int>> stack;
  auto rec = [&](auto&& self, int remaining, int max_len) -> void {
    if (remaining == 0) {
      ct.partition.assign(stack.rbegin(), stack.rend());
      visit(static_cast<const CycleType&>(ct));
      return;
    }
    for (int len = std::min(remaining, max_len); len >= 1; --len) {
      for (int mult = remaining / len; mult >= 1; --mult) {
        stack.emplace_back(len, mult);
        self(self, remaining - len * mult, len - 1);
        stack.pop_back();
      }
    }
  };
  rec(rec, n, n);
}

class StirlingTable {
 public:
  explicit StirlingTable(int max_n) : max_n_(max_n) {
    detail::require(max_n >= 0, "StirlingTable needs max_n >= 0");
    rows_.resize(static_cast<std::size_t>(max_n) + 1);
    rows_[0] = {BigInt(1)};
    for (int n = 0; n < max_n; ++n) {
      auto& next = rows_[static_cast<std::size_t>(n) + 1];
      next.assign(static_cast<std::size_t>(n) + 2, BigInt(0));
      const auto& row = rows_[static_cast<std::size_t>(n)];
      for (int k = 1; k <= n + 1; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        if (k <= n) next[ku] += n * row[ku];
        next[ku] += row[ku - 1];
      }
    }
  }

  int max_n() const { return max_n_; }
  const std::vector<BigInt>& row(int n) const { return rows_.at(static_cast<std::size_t>(n)); }

 private:
  int max_n_;
  std::vector<std::vector<BigInt>> rows_;
};

/// Unsigned Stirling number of the first kind [n k].
inline BigInt stirling_first(int n, int k, const StirlingTable& table) {
  if (n < 0 || k < 0 || k > n || n > table.max_n()) {
    throw domain_error("stirling_first: need 0 <= k <= n <= " + std::to_string(table.max_n()));
  }
  return table.row(n)[static_cast<std::size_t>(k)];
}

/// (1/n!) sum_sigma alpha^{c(sigma)}, computed both as C(n+alpha-1, n) and
/// through the Stirling row.
inline Rational mean_tau_alpha(int n, const Rational& alpha, const StirlingTable& table) {
  detail::require(alpha > 0, "mean_tau_alpha needs alpha > 0");
  detail::require(n >= 0 && n <= table.max_n(), "mean_tau_alpha: n outside the Stirling table");
  const Rational by_binomial = rising_binomial(alpha, static_cast<unsigned long>(n));
  Rational by_stirling = 0;
  Rational power = 1;
  const auto& row = table.row(n);
  for (std::size_t k = 0; k < row.size(); ++k) {
    by_stirling += Rational(row[k]) * power;
    power *= alpha;
  }
  by_stirling /= Rational(factorial(static_cast<unsigned long>(n)));
  if (by_binomial != by_stirling) {
    throw integrity_error("mean_tau_alpha: binomial and Stirling evaluations disagree at n = " + std::to_string(n));
  }
  return by_binomial;
}

inline constexpr double kMaxPermTerms = 1e8;
inline constexpr int kExactPermLimit = 300;

namespace detail_perm {

inline std::vector<int> block_bounds(int n, int k, const std::vector<Rational>& u) {
  detail::require(n >= 0, "n must be non-negative");
  detail::require(k >= 2 && k <= 6, "k must lie in [2, 6]");
  detail::require(static_cast<int>(u.size()) == k - 1, "rect must have k-1 coordinates");
  std::vector<int> bound;
  double terms = 1.0;
  for (const auto& ui : u) {
    detail::require(ui >= 0, "rect coordinates must be non-negative");
    bound.push_back(static_cast<int>(std::min<std::int64_t>(floor_mul(n, ui), n)));
    terms *= bound.back() + 1.0;
  }
  if (terms > kMaxPermTerms) throw resource_error("lhs_perm: more than 10^8 terms");
  return bound;
}

/// sum over m_1..m_{k-1} (m_i <= bound_i, sum <= n) of prod b[m_i] * b[n - sum]
template <class T>
T kickoff_sum(int n, const std::vector<int>& bound, const std::vector<T>& b) {
  const std::size_t dims = bound.size();
  T total = T(0);
  auto rec = [&](auto&& self, std::size_t i, int used, const T& prod) -> void {
    if (i == dims) {
      total += prod * b[static_cast<std::size_t>(n - used)];
      return;
    }
    const int top = std::min(bound[i], n - used);
    for (int m = 0; m <= top; ++m) self(self, i + 1, used + m, T(prod * b[static_cast<std::size_t>(m)]));
  };
  rec(rec, 0, 0, T(1));
  return total;
}

}  // namespace detail_perm

/// (1/n!) sum_sigma tau_k(sigma)^{-1} #{sigma-invariant ordered decompositions
/// with |A_i| <= n u_i}, via the binomial-product formula.
inline Rational lhs_perm_exact(int n, int k, const std::vector<Rational>& u) {
  const auto bound = detail_perm::block_bounds(n, k, u);
  const Rational a = make_rational(1, k);
  std::vector<Rational> b(static_cast<std::size_t>(n) + 1);
  b[0] = 1;
  for (int m = 1; m <= n; ++m) {
    b[static_cast<std::size_t>(m)] = b[static_cast<std::size_t>(m) - 1] * (a + m - 1) / m;
  }
  Rational out = detail_perm::kickoff_sum<Rational>(n, bound, b);
  out.canonicalize();
  return out;
}

/// Same quantity in double precision (exact path for n <= 300).
inline double lhs_perm_value(int n, int k, const std::vector<Rational>& u) {
  if (n <= kExactPermLimit) return lhs_perm_exact(n, k, u).get_d();
  const auto bound = detail_perm::block_bounds(n, k, u);
  const double a = 1.0 / k;
  std::vector<double> b(static_cast<std::size_t>(n) + 1);
  b[0] = 1.0;
  for (int m = 1; m <= n; ++m) b[static_cast<std::size_t>(m)] = b[static_cast<std::size_t>(m) - 1] * (a + m - 1) / m;
  return detail_perm::kickoff_sum<double>(n, bound, b);
}

namespace detail_perm {

using Count = unsigned __int128;

inline BigInt to_big(Count c) {
  BigInt hi(static_cast<unsigned long>(static_cast<std::uint64_t>(c >> 64)));
  BigInt lo(static_cast<unsigned long>(static_cast<std::uint64_t>(c)));
  return (hi << 64) + lo;
}

}  // namespace detail_perm

/// Cycle-type enumeration: assigns each cycle to one of k ordered blocks by
/// dynamic programming over the sizes of the first k-1 blocks.
inline Rational lhs_perm_brute(int n, int k, const std::vector<Rational>& u) {
  detail::require(n <= 40, "lhs_perm_brute supports n <= 40");
  const auto bound = detail_perm::block_bounds(n, k, u);
  const std::size_t dims = bound.size();
  std::vector<std::size_t> stride(dims, 1);
  std::size_t states = 1;
  for (std::size_t i = dims; i-- > 0;) {
    stride[i] = states;
    states *= static_cast<std::size_t>(bound[i]) + 1;
  }
  BigInt numerator = 0;
  BigInt denominator = factorial(static_cast<unsigned long>(n)) * ipow(BigInt(k), static_cast<unsigned long>(n));
  std::vector<detail_perm::Count> cur(states), next(states);
  for_each_cycle_type(n, [&](const CycleType& ct) {
    std::fill(cur.begin(), cur.end(), 0);
    cur[0] = 1;
    for (auto [len, mult] : ct.partition) {
      for (int rep = 0; rep < mult; ++rep) {
        next = cur;  // cycle goes to the last block
        for (std::size_t s = 0; s < states; ++s) {
          if (cur[s] == 0) continue;
          for (std::size_t i = 0; i < dims; ++i) {
            const int size = static_cast<int>((s / stride[i]) % (static_cast<std::size_t>(bound[i]) + 1));
            if (size + len <= bound[i]) next[s + static_cast<std::size_t>(len) * stride[i]] += cur[s];
          }
        }
        std::swap(cur, next);
      }
    }
    detail_perm::Count admissible = 0;
    for (auto c : cur) admissible += c;
    // weight / k^{c(sigma)} rescaled to the common denominator n! k^n
    numerator += ct.class_size() * detail_perm::to_big(admissible) * ipow(BigInt(k), static_cast<unsigned long>(n - ct.cycles()));
  });
  Rational out(numerator, denominator);
  out.canonicalize();
  return out;
}

inline DeviationReport deviation_perm(int n, int k, double grid_step, double tol = 1e-10) {
  const auto grid = make_rect_grid(k, grid_step);
  const auto params = dirichlet::DirichletParams::symmetric(k, 1.0 / k);
  DeviationReport report;
  report.kind = "perms";
  report.scale = n;
  report.k = k;
  report.model = "uniform";
  report.grid_step = grid_step;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    auto u = grid.as_double(i);
    const double limit = dirichlet::cdf(params, {u}, tol);
    report.add(std::move(u), lhs_perm_value(n, k, grid.as_rational(i)), limit);
  }
  report.scaled_sup_dev = report.sup_dev * std::pow(static_cast<double>(n), 1.0 / k);
  return report;
}

}  // namespace dirlaw::perms
