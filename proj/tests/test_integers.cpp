#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dirlaw/integers.hpp"
#include "oracles.hpp"

using namespace dirlaw;
using namespace dirlaw::integers;
using arith::WeightModel;

namespace {

const arith::SpfSieve& sieve() {
  static const auto s = arith::build_spf_sieve(100'000);
  return s;
}

int valuation(std::uint64_t n, std::uint64_t p) {
  int v = 0;
  for (; n % p == 0; n /= p) ++v;
  return v;
}

/// Weighted left-hand side by enumerating every ordered k-tuple of each n.
Rational weighted_oracle(std::uint64_t x, const WeightModel& m, const std::vector<Rational>& u) {
  Rational num = 0, norm = 0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    const auto fn = arith::factorize(n, sieve());
    const Rational f = arith::f_value_exact(m, fn);
    if (f == 0) continue;
    norm += f;
    Rational inside = 0, total = 0;
    oracle::for_each_factorization(n, m.k(), [&](const std::vector<std::uint64_t>& d) {
      Rational g = 1;
      for (const auto& pp : fn.factors) {
        std::vector<int> comp;
        for (auto dj : d) comp.push_back(valuation(dj, pp.p));
        g *= m.g_local_exact(pp.p, comp);
      }
      total += g;
      bool ok = true;
      for (std::size_t i = 0; i + 1 < d.size() && ok; ++i) ok = n == 1 || oracle::pow_le(d[i], n, u[i]);
      if (ok) inside += g;
    });
    num += f * inside / total;
  }
  Rational out = num / norm;
  out.canonicalize();
  return out;
}

std::vector<std::vector<Rational>> tenth_grid(int k) {
  std::vector<std::vector<Rational>> out;
  for (int a = 0; a <= 10; ++a) {
    if (k == 2) {
      out.push_back({make_rational(a, 10)});
      continue;
    }
    for (int b = 0; a + b <= 10; ++b) out.push_back({make_rational(a, 10), make_rational(b, 10)});
  }
  return out;
}

}  // namespace

TEST(ExactLhs, HandOracles) {
  const auto m = WeightModel::uniform(2);
  EXPECT_EQ(exact_lhs_rational(4, m, {make_rational(1, 2)}, sieve()), make_rational(2, 3));
  EXPECT_EQ(exact_lhs_rational(4, m, {make_rational(1, 4)}, sieve()), make_rational(7, 12));
  EXPECT_NEAR(exact_lhs(4, m, {{0.5}}, sieve()), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(exact_lhs(4, m, {{0.25}}, sieve()), 7.0 / 12.0, 1e-15);
  for (std::uint64_t x : {1u, 7u, 1000u}) EXPECT_EQ(exact_lhs_rational(x, m, {Rational(1)}, sieve()), 1);
}

TEST(ExactLhs, BruteForceOracleUniform) {
  for (int k : {2, 3}) {
    const auto m = WeightModel::uniform(k);
    for (std::uint64_t x : {1u, 2u, 16u, 60u, 150u}) {
      for (const auto& u : tenth_grid(k)) {
        ASSERT_EQ(exact_lhs_rational(x, m, u, sieve()), oracle::integers_lhs(x, k, u)) << "x=" << x << " k=" << k;
      }
    }
  }
}

TEST(ExactLhs, BruteForceOracleWeightedModels) {
  for (const auto& m : {WeightModel::nested(3), WeightModel::tau_weights(1, {1, 2, 3}), WeightModel::tau_weights(make_rational(1, 2), {1, 1}),
                        WeightModel::residues(4), WeightModel::coprime(3, {{1, 2}}), WeightModel::two_squares(2),
                        WeightModel::squarefree(2)}) {
    for (const auto& u : tenth_grid(m.k())) {
      ASSERT_EQ(exact_lhs_rational(80, m, u, sieve()), weighted_oracle(80, m, u)) << m.id();
    }
  }
}

TEST(ExactLhs, FloatingPathMatchesRational) {
  for (const auto& m : {WeightModel::uniform(2), WeightModel::nested(3), WeightModel::residues(5)}) {
    const int dims = m.k() - 1;
    for (const auto& u : std::vector<std::vector<Rational>>{std::vector<Rational>(static_cast<std::size_t>(dims), make_rational(1, 4)),
                                                             std::vector<Rational>(static_cast<std::size_t>(dims), make_rational(1, dims + 1))}) {
      std::vector<double> ud;
      for (const auto& r : u) ud.push_back(r.get_d());
      EXPECT_NEAR(exact_lhs(2000, m, {ud}, sieve()), exact_lhs_rational(2000, m, u, sieve()).get_d(), 1e-12) << m.id();
    }
  }
}

TEST(ExactLhs, FullRectIsOne) {
  const auto m = WeightModel::uniform(2);
  for (std::uint64_t x = 1; x <= 300; ++x) ASSERT_NEAR(exact_lhs(x, m, {{1.0}}, sieve()), 1.0, 1e-15) << x;
  EXPECT_NEAR(exact_lhs(10'000, m, {{1.0}}, sieve()), 1.0, 1e-15);
}

TEST(ExactLhs, MonotoneInU) {
  const auto m = WeightModel::uniform(3);
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; a + b < 10; ++b) {
      const auto base = exact_lhs_rational(500, m, {make_rational(a, 10), make_rational(b, 10)}, sieve());
      EXPECT_LE(base, exact_lhs_rational(500, m, {make_rational(a + 1, 10), make_rational(b, 10)}, sieve()));
      EXPECT_LE(base, exact_lhs_rational(500, m, {make_rational(a, 10), make_rational(b + 1, 10)}, sieve()));
    }
  }
}

TEST(ExactLhs, Errors) {
  const auto m = WeightModel::uniform(2);
  EXPECT_THROW(exact_lhs_rational(4, m, {make_rational(1, 2), make_rational(1, 4)}, sieve()), domain_error);
  EXPECT_THROW(exact_lhs_rational(4, m, {Rational(2)}, sieve()), domain_error);
  EXPECT_THROW(exact_lhs_rational(4, m, {Rational(-1)}, sieve()), domain_error);
  EXPECT_THROW(exact_lhs(4, m, {{1.5}}, sieve()), domain_error);
  EXPECT_THROW(exact_lhs_rational(200'000, m, {Rational(1)}, sieve()), domain_error);
}

TEST(PowerLe, Ties) {
  EXPECT_TRUE(power_le(4, 16, make_rational(1, 2)));
  EXPECT_FALSE(power_le(5, 16, make_rational(1, 2)));
  EXPECT_TRUE(power_le(8, 4096, make_rational(1, 4)));
  EXPECT_FALSE(power_le(9, 4096, make_rational(1, 4)));
  EXPECT_TRUE(power_le(1, 1, Rational(0)));
  EXPECT_FALSE(power_le(2, 1, Rational(1)));
}

TEST(Histogram, Examples) {
  const auto m = WeightModel::uniform(2);
  const auto h1 = accumulate_histogram(1, m, 10, 1, sieve());
  EXPECT_EQ(h1.total_weight, h1.normalizer);
  EXPECT_DOUBLE_EQ(empirical_cdf(h1, {0.0}), 1.0);
  const auto h100 = accumulate_histogram(100, m, 100, 1, sieve());
  EXPECT_EQ(empirical_cdf(h100, {1.0}), 1.0);
  EXPECT_GE(empirical_cdf(h100, {0.0}), 0.01);
  EXPECT_THROW(accumulate_histogram(100, m, 9, 1, sieve()), domain_error);
  EXPECT_THROW(accumulate_histogram(100, m, 2001, 1, sieve()), domain_error);
  EXPECT_THROW(accumulate_histogram(100, WeightModel::uniform(4), 1000, 1, sieve()), resource_error);
}

TEST(Histogram, MatchesExactWithinOneBinShell) {
  const auto m = WeightModel::uniform(2);
  const int bins = 1000;
  const auto h = accumulate_histogram(10'000, m, bins, 1, sieve());
  EXPECT_LE(std::abs(empirical_cdf(h, {0.5}) - exact_lhs(10'000, m, {{0.5}}, sieve())), 0.02);
  for (int i = 1; i < 10; ++i) {
    const double u = i / 10.0;
    const double shell = exact_lhs(10'000, m, {{u + 1.0 / bins}}, sieve()) - exact_lhs(10'000, m, {{u - 1.0 / bins}}, sieve());
    EXPECT_LE(std::abs(empirical_cdf(h, {u}) - exact_lhs(10'000, m, {{u}}, sieve())), shell + 1e-12) << u;
  }
  const auto m3 = WeightModel::uniform(3);
  const auto h3 = accumulate_histogram(5000, m3, 200, 1, sieve());
  for (auto [a, b] : {std::pair{0.2, 0.3}, {0.5, 0.4}, {0.1, 0.1}}) {
    const double shell = exact_lhs(5000, m3, {{a + 0.005, b + 0.005}}, sieve()) - exact_lhs(5000, m3, {{a - 0.005, b - 0.005}}, sieve());
    EXPECT_LE(std::abs(empirical_cdf(h3, {a, b}) - exact_lhs(5000, m3, {{a, b}}, sieve())), shell + 1e-12);
  }
}

TEST(Histogram, ShardCountDoesNotChangeBits) {
  for (const auto& m : {WeightModel::uniform(2), WeightModel::nested(3)}) {
    const auto a = accumulate_histogram(30'000, m, 100, 1, sieve());
    for (int shards : {2, 8}) {
      const auto b = accumulate_histogram(30'000, m, 100, shards, sieve());
      EXPECT_TRUE(a.weights == b.weights) << m.id() << ' ' << shards;
      EXPECT_TRUE(a.total_weight == b.total_weight);
      EXPECT_TRUE(a.normalizer == b.normalizer);
    }
  }
}

TEST(SupDeviation, Examples) {
  const auto m = WeightModel::uniform(2);
  const auto r = sup_deviation(4, m, 0.25, sieve());
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_NEAR(r.sup_dev, 0.25, 1e-12);
  EXPECT_NEAR(r.rows[0].empirical, 7.0 / 12.0, 1e-15);
  EXPECT_NEAR(r.rows[0].limit, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.rows[2].deviation, 0.0, 1e-12);
  const auto one = sup_deviation(1, m, 0.1, sieve());
  double expected = 0.0;
  for (int i = 1; i < 10; ++i) expected = std::max(expected, 1.0 - dirichlet::cdf_arcsine(i / 10.0));
  EXPECT_NEAR(one.sup_dev, expected, 1e-10);
  EXPECT_EQ(one.scaled_sup_dev, 0.0);
  EXPECT_THROW(sup_deviation(4, m, 0.3, sieve()), domain_error);
}

TEST(SupDeviation, ScaledUsesMinExponent) {
  const auto r = sup_deviation(5000, WeightModel::nested(3), 0.25, sieve());
  EXPECT_NEAR(r.scaled_sup_dev, r.sup_dev * std::pow(std::log(5000.0), 0.25), 1e-15);
}

TEST(ConvergenceStudy, Basics) {
  const auto m = WeightModel::uniform(2);
  EXPECT_EQ(convergence_study({1000}, m, 0.05, sieve()).size(), 1u);
  EXPECT_THROW(convergence_study({1000, 100}, m, 0.05, sieve()), domain_error);
  const auto reports = convergence_study({1000, 10'000, 100'000}, m, 0.05, sieve());
  EXPECT_GT(reports[0].sup_dev, reports[1].sup_dev);
  EXPECT_GT(reports[1].sup_dev, reports[2].sup_dev);
}

TEST(WeightedSum, Examples) {
  const double e = std::numbers::e;
  const auto tiny = weighted_sum_S({e, e}, sieve());
  const double l2 = std::log(2.0);
  EXPECT_DOUBLE_EQ(tiny.s, l2 * l2 * l2 * l2 / 3.0);
  EXPECT_GT(tiny.main, 0.0);
  EXPECT_THROW(weighted_sum_S({2.0, 10.0}, sieve()), domain_error);
  EXPECT_THROW(weighted_sum_S({20'000.0, 20'000.0}, sieve()), resource_error);
}

TEST(WeightedSum, MatchesDoubleLoopOracle) {
  const auto r = weighted_sum_S({300.0, 200.0}, sieve());
  EXPECT_EQ(r.s, oracle::weighted_sum_k2(300, 200));
}

TEST(WeightedSum, MainTermClosedFormK1) {
  // k = 1: int_1^x (log y)^2 dy = x((log x)^2 - 2 log x + 2) - 2
  for (double x : {10.0, 1000.0}) {
    const double l = std::log(x);
    EXPECT_NEAR(weighted_sum_main_term({x}), x * (l * l - 2 * l + 2) - 2, 1e-9 * x * l * l);
  }
}

TEST(MonteCarloLhs, Examples) {
  const auto m = WeightModel::uniform(2);
  const auto est = mc_lhs(4, m, {{0.5}}, 1'000'000, 1, sieve());
  EXPECT_LE(std::abs(est.estimate - 2.0 / 3.0), 4 * est.stderr_);
  const auto whole = mc_lhs(4, m, {{1.0}}, 1000, 2, sieve());
  EXPECT_EQ(whole.estimate, 1.0);
  EXPECT_EQ(whole.stderr_, 0.0);
  const auto sq = WeightModel::squarefree(2);
  const auto est_sq = mc_lhs(100'000, sq, {{0.25}}, 200'000, 3, sieve());
  EXPECT_LE(std::abs(est_sq.estimate - exact_lhs(100'000, sq, {{0.25}}, sieve())), 4 * est_sq.stderr_);
  EXPECT_THROW(mc_lhs(100, WeightModel::tau_weights(2, {1, 1}), {{0.5}}, 1000, 1, sieve()), unsupported_error);
  EXPECT_THROW(mc_lhs(100, m, {{0.5}}, 999, 1, sieve()), domain_error);
}
