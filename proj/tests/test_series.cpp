#include <gtest/gtest.h>

#include <cmath>

#include "dirlaw/series.hpp"

using namespace dirlaw;
using namespace dirlaw::series;

namespace {

const arith::SpfSieve& sieve() {
  static const auto s = arith::build_spf_sieve(5000);
  return s;
}

double zeta_oracle(double s) {
  // Euler-Maclaurin with a handful of Bernoulli terms
  const int m = 50;
  double sum = 0.0;
  for (int n = 1; n < m; ++n) sum += std::pow(n, -s);
  const double mm = m;
  sum += std::pow(mm, 1 - s) / (s - 1) + 0.5 * std::pow(mm, -s) + s / 12.0 * std::pow(mm, -s - 1) -
         s * (s + 1) * (s + 2) / 720.0 * std::pow(mm, -s - 3);
  return sum;
}

}  // namespace

TEST(DirectSeries, SmallCutoffs) {
  EXPECT_NEAR(std::abs(d_direct({2.0, 2.0}, 1, sieve()).value - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(d_direct({2.0, 2.0}, 2, sieve()).value.real(), 1.0 + 0.25 + 1.0 / 48.0, 1e-14);
  EXPECT_NEAR(d_direct({2.0, 2.0}, 2, sieve()).value.imag(), 0.0, 1e-15);
}

TEST(DirectSeries, SingleVariableIsPartialZeta) {
  const Complex s(1.5, 3.0);
  Complex partial = 0.0;
  for (int n = 1; n <= 1000; ++n) partial += std::exp(-s * std::log(static_cast<double>(n)));
  const auto v = d_direct({s}, 1000, sieve());
  EXPECT_NEAR(std::abs(v.value - partial), 0.0, 1e-12);
  EXPECT_NEAR(v.tail_bound, std::pow(1000.0, -0.5) / 0.5, 1e-9);
}

TEST(DirectSeries, Errors) {
  EXPECT_THROW(d_direct({}, 10, sieve()), domain_error);
  EXPECT_THROW(d_direct({1.2, 2.0}, 10, sieve()), domain_error);
  EXPECT_THROW(d_direct({2.0}, 0, sieve()), domain_error);
  EXPECT_THROW(d_direct({2.0}, 6000, sieve()), domain_error);
  EXPECT_THROW(d_direct({2.0}, 200'000, arith::build_spf_sieve(10)), domain_error);
}

TEST(EulerProduct, AgreesWithDirectWithinTails) {
  const double sigmas[] = {1.5, 2.0, 3.0};
  for (double a : sigmas) {
    for (double b : sigmas) {
      const std::vector<Complex> s{Complex(a, 1.0), Complex(b, -2.0)};
      const auto direct = d_direct(s, 2000, sieve());
      const auto euler = d_euler(s, 10'000, 40);
      EXPECT_LE(std::abs(direct.value - euler.value), direct.tail_bound + euler.tail_bound) << a << ' ' << b;
    }
  }
  for (double a : sigmas) {
    const std::vector<Complex> s{a, 2.0, Complex(3.0, 0.5)};
    const auto direct = d_direct(s, 120, sieve());
    const auto euler = d_euler(s, 10'000, 40);
    EXPECT_LE(std::abs(direct.value - euler.value), direct.tail_bound + euler.tail_bound) << a;
  }
}

TEST(EulerProduct, DiagonalIsZeta) {
  for (double s : {1.5, 2.0, 3.0}) {
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto e = d_euler(std::vector<Complex>(k, Complex(s)), 100'000, 40);
      EXPECT_LE(std::abs(e.value - zeta_oracle(s)), e.tail_bound) << s << ' ' << k;
      EXPECT_NEAR(e.value.imag(), 0.0, 1e-14);
    }
  }
  EXPECT_NEAR(zeta_oracle(2.0), std::numbers::pi * std::numbers::pi / 6, 1e-12);
}

TEST(EulerProduct, Errors) {
  EXPECT_THROW(d_euler({}, 10, 4), domain_error);
  EXPECT_THROW(d_euler({1.0}, 10, 4), domain_error);
  EXPECT_THROW(d_euler({2.0}, 10, 0), domain_error);
  EXPECT_NEAR(std::abs(d_euler({2.0, 2.0}, 1, 4).value - 1.0), 0.0, 0.0);
}

TEST(LocalFactor, TelescopesExactly) {
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 31ULL, 97ULL}) {
    for (int k = 1; k <= 5; ++k) {
      for (int v : {1, 2, 7, 30}) {
        const BigInt pb(static_cast<unsigned long>(p));
        const Rational expected = 1 - Rational(1) / Rational(ipow(pb, static_cast<unsigned long>(v + 1)));
        ASSERT_EQ(a0_local_check(p, k, v), expected) << p << ' ' << k << ' ' << v;
      }
    }
  }
  EXPECT_THROW(a0_local_check(4, 2, 3), domain_error);
  EXPECT_THROW(a0_local_check(2, 0, 3), domain_error);
}

TEST(PrimeSum, Models) {
  const auto uniform = arith::WeightModel::uniform(3);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(prime_sum_diag(uniform, j, 1.5, 10'000), Complex(0.0));

  const auto sf = arith::WeightModel::squarefree(2);
  const auto a = prime_sum_diag(sf, 0, Complex(1.5, 2.0), 10'000);
  const auto b = prime_sum_diag(sf, 0, Complex(1.5, 2.0), 100'000);
  EXPECT_LE(std::abs(a - b), 2.0 * std::pow(10'000.0, -0.5));

  const auto ts = arith::WeightModel::two_squares(2);
  for (double sigma : {1.01, 1.1, 1.5}) EXPECT_LT(std::abs(prime_sum_diag(ts, 1, sigma, 100'000)), 2.0) << sigma;

  EXPECT_THROW(prime_sum_diag(uniform, 3, 2.0, 100), domain_error);
  EXPECT_THROW(prime_sum_diag(uniform, 0, 1.0, 100), domain_error);
  EXPECT_EQ(prime_sum_diag(sf, 0, 2.0, 1), Complex(0.0));
}
