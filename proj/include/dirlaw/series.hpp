#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "dirlaw/arith.hpp"
#include "dirlaw/errors.hpp"
#include "dirlaw/models.hpp"
#include "dirlaw/rational.hpp"

namespace dirlaw::series {

using Complex = std::complex<double>;

struct SeriesValue {
  Complex value;
  double tail_bound = 0.0;  // certified bound on |full series - value|
};

inline constexpr std::uint64_t kMaxDirectN = 100'000;

namespace detail_series {

/// sum_{n > m} n^{-sigma} <= m^{1-sigma} / (sigma - 1)
inline double tail_upper(double sigma, double m) { return std::pow(m, 1.0 - sigma) / (sigma - 1.0); }

/// zeta(sigma) <= sum_{n <= 1000} n^{-sigma} + 1000^{1-sigma}/(sigma-1)
inline double zeta_upper(double sigma) {
  double sum = 0.0;
  for (int n = 1000; n >= 1; --n) sum += std::pow(static_cast<double>(n), -sigma);
  return (sum + tail_upper(sigma, 1000.0)) * (1.0 + 1e-12);
}

/// sum_j prod_{i != j} zeta(sigma_i) * sum_{n > cutoff} n^{-sigma_j}
inline double tuple_tail(const std::vector<double>& sigma, double cutoff) {
  double out = 0.0;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    double term = tail_upper(sigma[j], cutoff);
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (i != j) term *= zeta_upper(sigma[i]);
    }
    out += term;
  }
  return out * (1.0 + 1e-12);
}

inline std::vector<double> real_parts(const std::vector<Complex>& s) {
  std::vector<double> out;
  for (const auto& z : s) out.push_back(z.real());
  return out;
}

}  // namespace detail_series

/// Truncated multiple Dirichlet series: sum over n_j <= N of
/// tau_k(n_1 ... n_k)^{-1} prod n_j^{-s_j}.
inline SeriesValue d_direct(const std::vector<Complex>& s, std::uint64_t n_max, const arith::SpfSieve& sieve) {
  const std::size_t k = s.size();
  detail::require(k >= 1, "d_direct needs at least one variable");
  detail::require(n_max >= 1 && n_max <= kMaxDirectN, "d_direct needs 1 <= N <= 10^5");
  detail::require(sieve.limit() >= n_max, "sieve does not cover N");
  for (const auto& z : s) detail::require(z.real() >= 1.5, "d_direct needs every real part >= 1.5");

  std::vector<std::vector<arith::PrimePower>> factors(n_max + 1);
  for (std::uint64_t n = 1; n <= n_max; ++n) factors[n] = arith::factorize(n, sieve).factors;
  std::vector<std::vector<Complex>> powers(k, std::vector<Complex>(n_max + 1));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::uint64_t n = 1; n <= n_max; ++n) powers[j][n] = std::exp(-s[j] * std::log(static_cast<double>(n)));
  }
  // binomial(v + k - 1, k - 1) for the merged exponents
  const int max_v = static_cast<int>(k) * 64;
  std::vector<double> tau_local(static_cast<std::size_t>(max_v) + 1);
  for (int v = 0; v <= max_v; ++v) {
    tau_local[static_cast<std::size_t>(v)] = binomial(static_cast<unsigned long>(v) + k - 1, k - 1).get_d();
  }

  std::vector<std::pair<std::uint64_t, int>> merged;
  Complex total = 0.0;
  std::vector<std::uint64_t> idx(k, 1);
  auto rec = [&](auto&& self, std::size_t j, Complex prod) -> void {
    if (j == k) {
      merged.clear();
      for (std::size_t i = 0; i < k; ++i) {
        for (const auto& pp : factors[idx[i]]) {
          auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& e) { return e.first == pp.p; });
          if (it == merged.end()) {
            merged.emplace_back(pp.p, pp.v);
          } else {
            it->second += pp.v;
          }
        }
      }
      double tau = 1.0;
      for (const auto& [p, v] : merged) tau *= tau_local[static_cast<std::size_t>(v)];
      total += prod / tau;
      return;
    }
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      idx[j] = n;
      self(self, j + 1, prod * powers[j][n]);
    }
  };
  rec(rec, 0, Complex(1.0));
  return {total, detail_series::tuple_tail(detail_series::real_parts(s), static_cast<double>(n_max))};
}

/// Truncated Euler product over p <= P with every exponent v_j <= V.
inline SeriesValue d_euler(const std::vector<Complex>& s, std::uint64_t prime_cutoff, int max_exponent) {
  const std::size_t k = s.size();
  detail::require(k >= 1, "d_euler needs at least one variable");
  detail::require(max_exponent >= 1, "d_euler needs V >= 1");
  for (const auto& z : s) detail::require(z.real() > 1.0, "d_euler needs every real part > 1");
  const int kv = static_cast<int>(k) * max_exponent;
  std::vector<double> inv_tau(static_cast<std::size_t>(kv) + 1);
  for (int v = 0; v <= kv; ++v) {
    inv_tau[static_cast<std::size_t>(v)] = 1.0 / binomial(static_cast<unsigned long>(v) + k - 1, k - 1).get_d();
  }
  Complex product = 1.0;
  if (prime_cutoff >= 2) {
    const arith::SpfSieve sieve(prime_cutoff);
    std::vector<Complex> coeff, next;
    for (std::uint64_t p : sieve.primes_up_to(prime_cutoff)) {
      const double logp = std::log(static_cast<double>(p));
      // coefficients of t^v in prod_j sum_{v_j <= V} (p^{-s_j} t)^{v_j}
      coeff.assign(1, Complex(1.0));
      for (std::size_t j = 0; j < k; ++j) {
        const Complex x = std::exp(-s[j] * logp);
        next.assign(coeff.size() + static_cast<std::size_t>(max_exponent), Complex(0.0));
        for (std::size_t a = 0; a < coeff.size(); ++a) {
          Complex xp = 1.0;
          for (int v = 0; v <= max_exponent; ++v) {
            next[a + static_cast<std::size_t>(v)] += coeff[a] * xp;
            xp *= x;
          }
        }
        coeff.swap(next);
      }
      Complex factor = 0.0;
      for (std::size_t v = coeff.size(); v-- > 0;) factor += coeff[v] * inv_tau[v];
      product *= factor;
    }
  }
  // dropped tuples all have some n_j > min(P, 2^{V+1} - 1)
  const double cutoff = std::min(static_cast<double>(std::max<std::uint64_t>(prime_cutoff, 1)), std::ldexp(1.0, max_exponent + 1) - 1.0);
  return {product, detail_series::tuple_tail(detail_series::real_parts(s), cutoff)};
}

/// (1 - 1/p) sum_{v <= V} p^{-v} sum_{compositions c of v into k parts} C(v+k-1, k-1)^{-1}
inline Rational a0_local_check(std::uint64_t p, int k, int max_v) {
  detail::require(p >= 2, "a0_local_check needs a prime p");
  for (std::uint64_t d = 2; d * d <= p; ++d) detail::require(p % d != 0, "a0_local_check needs a prime p");
  detail::require(k >= 1, "a0_local_check needs k >= 1");
  detail::require(max_v >= 1, "a0_local_check needs V >= 1");
  // compositions[v] counted by adding one part at a time
  std::vector<BigInt> count(static_cast<std::size_t>(max_v) + 1, BigInt(1));
  for (int part = 2; part <= k; ++part) {
    for (int v = 1; v <= max_v; ++v) count[static_cast<std::size_t>(v)] += count[static_cast<std::size_t>(v) - 1];
  }
  Rational sum = 0;
  const BigInt pb(static_cast<unsigned long>(p));
  for (int v = 0; v <= max_v; ++v) {
    const Rational inner(count[static_cast<std::size_t>(v)],
                         binomial(static_cast<unsigned long>(v + k - 1), static_cast<unsigned long>(k - 1)));
    sum += inner / Rational(ipow(pb, static_cast<unsigned long>(v)));
  }
  Rational out = (1 - Rational(1, pb)) * sum;
  out.canonicalize();
  return out;
}

/// sum_{p <= P} (F(1, ..., p, ..., 1) - alpha_j) p^{-s}, coordinate j zero-based.
inline Complex prime_sum_diag(const arith::WeightModel& model, int j, Complex s, std::uint64_t prime_cutoff) {
  detail::require(j >= 0 && j < model.k(), "coordinate outside the model dimension");
  detail::require(s.real() > 1.0, "prime_sum_diag needs real part > 1");
  const double alpha = model.predicted()[static_cast<std::size_t>(j)];
  Complex total = 0.0;
  if (prime_cutoff < 2) return total;
  const arith::SpfSieve sieve(prime_cutoff);
  for (std::uint64_t p : sieve.primes_up_to(prime_cutoff)) {
    const double diff = arith::single_coordinate_weight(model, static_cast<std::uint32_t>(p), 1, j) - alpha;
    if (diff != 0.0) total += diff * std::exp(-s * std::log(static_cast<double>(p)));
  }
  return total;
}

}  // namespace dirlaw::series
