#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "dirlaw/polyfield.hpp"
#include "oracles.hpp"

using namespace dirlaw;
using namespace dirlaw::poly;

namespace {

PolyQ P(std::uint32_t q, std::vector<std::uint32_t> c) { return PolyQ(q, std::move(c)); }

const IrreducibleTable& table2() {
  static const auto t = build_irreducibles(2, 8);
  return t;
}

}  // namespace

TEST(PolyArith, Examples) {
  EXPECT_EQ(poly_mul(P(2, {1, 1}), P(2, {1, 1})), P(2, {1, 0, 1}));
  auto [quot, rem] = poly_divrem(P(2, {0, 1, 1}), P(2, {0, 1}));
  EXPECT_EQ(quot, P(2, {1, 1}));
  EXPECT_TRUE(rem.is_zero());
  EXPECT_EQ(poly_mul(P(3, {1, 1}), P(3, {2, 1})), P(3, {2, 0, 1}));
}

TEST(PolyArith, ErrorsAndNormalization) {
  EXPECT_THROW(poly_mul(P(2, {1}), P(3, {1})), domain_error);
  EXPECT_THROW(poly_divrem(P(3, {1, 1}), P(3, {})), domain_error);
  EXPECT_THROW(PolyQ(4, {1}), domain_error);
  EXPECT_EQ(P(3, {4, 3, 0}), P(3, {1}));
  EXPECT_EQ(P(5, {0, 0}).degree(), -1);
}

TEST(PolyArith, DivisionIdentityNonMonicDivisor) {
  for (std::uint64_t a = 1; a < 400; a += 7) {
    for (std::uint64_t b = 1; b < 60; b += 5) {
      const auto pa = PolyQ::from_code(5, a), pb = PolyQ::from_code(5, b);
      auto [quot, rem] = poly_divrem(pa, pb);
      EXPECT_LT(rem.degree(), pb.degree());
      auto back = poly_mul(quot, pb);
      std::vector<std::uint32_t> sum(std::max(back.coeffs().size(), rem.coeffs().size()), 0);
      for (std::size_t i = 0; i < back.coeffs().size(); ++i) sum[i] += back.coeffs()[i];
      for (std::size_t i = 0; i < rem.coeffs().size(); ++i) sum[i] += rem.coeffs()[i];
      EXPECT_EQ(PolyQ(5, sum), pa);
    }
  }
}

TEST(PolyArith, CodeArithMatchesPolyMul) {
  for (std::uint32_t q : {2u, 3u, 7u}) {
    const CodeArith ar(q);
    for (std::uint64_t a = 1; a < 300; a += 3) {
      for (std::uint64_t b = 1; b < 200; b += 7) {
        ASSERT_EQ(ar.mul(a, b), poly_mul(PolyQ::from_code(q, a), PolyQ::from_code(q, b)).code()) << q << ' ' << a << ' ' << b;
      }
    }
  }
}

TEST(Irreducibles, Examples) {
  const auto t = build_irreducibles(2, 4);
  EXPECT_EQ(t.by_degree[1], (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(t.by_degree[2], (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(t.count(4), 3u);
  EXPECT_THROW(build_irreducibles(4, 3), domain_error);
  EXPECT_THROW(build_irreducibles(17, 3), domain_error);
  EXPECT_THROW(build_irreducibles(2, 27), resource_error);
}

TEST(Irreducibles, NecklaceCounts) {
  // q = 5 stops at degree 11, the largest degree under the 10^8 guard
  for (auto [q, max_deg] : {std::pair{2u, 12}, {3u, 12}, {5u, 11}}) {
    const auto t = build_irreducibles(q, max_deg);
    for (int d = 1; d <= max_deg; ++d) EXPECT_EQ(t.count(d), necklace_count(q, d)) << q << ' ' << d;
  }
  EXPECT_EQ(necklace_count(5, 12), 20343700u);
  EXPECT_EQ(necklace_count(5, 11), 4438920u);
}

TEST(Irreducibles, AgreeWithTrialDivision) {
  for (std::uint32_t q : {2u, 3u}) {
    const auto t = build_irreducibles(q, 6);
    for (int d = 1; d <= 6; ++d) {
      std::vector<std::uint64_t> brute;
      for (const auto& f : oracle::monic(static_cast<int>(q), d)) {
        if (!oracle::irreducible(f, static_cast<int>(q))) continue;
        std::uint64_t code = 0;
        for (std::size_t i = f.size(); i-- > 0;) code = code * q + static_cast<std::uint64_t>(f[i]);
        brute.push_back(code);
      }
      std::sort(brute.begin(), brute.end());
      EXPECT_EQ(t.by_degree[static_cast<std::size_t>(d)], brute) << q << ' ' << d;
    }
  }
}

TEST(FactorPoly, Examples) {
  const auto a = factor_poly(P(2, {0, 1, 1}), table2());
  ASSERT_EQ(a.factors.size(), 2u);
  EXPECT_EQ(a.factors[0].factor, P(2, {0, 1}));
  EXPECT_EQ(a.factors[1].factor, P(2, {1, 1}));
  const auto b = factor_poly(P(2, {0, 0, 1}), table2());
  ASSERT_EQ(b.factors.size(), 1u);
  EXPECT_EQ(b.factors[0].exponent, 2);
  const auto c = factor_poly(P(2, {1, 1, 1}), table2());
  ASSERT_EQ(c.factors.size(), 1u);
  EXPECT_EQ(c.factors[0].factor, P(2, {1, 1, 1}));
  EXPECT_THROW(factor_poly(P(3, {1, 2}), table2()), domain_error);
  EXPECT_THROW(factor_poly(P(2, {1, 1, 0}), build_irreducibles(3, 2)), domain_error);
}

TEST(FactorPoly, RefactoringReconstructsEveryPolynomial) {
  const auto t = build_irreducibles(2, 6);
  for (int d = 0; d <= 12; ++d) {
    for (std::uint64_t code = 1ULL << d; code < (2ULL << d); ++code) {
      const auto f = PolyQ::from_code(2, code);
      const auto fp = factor_poly(f, t);
      PolyQ prod(2, {1});
      for (const auto& pf : fp.factors) {
        ASSERT_TRUE(pf.factor.is_monic());
        ASSERT_GE(pf.exponent, 1);
        if (pf.factor.degree() <= 6) {
          const auto& list = t.by_degree[static_cast<std::size_t>(pf.factor.degree())];
          ASSERT_TRUE(std::binary_search(list.begin(), list.end(), pf.factor.code()));
        }
        for (int e = 0; e < pf.exponent; ++e) prod = poly_mul(prod, pf.factor);
      }
      ASSERT_EQ(prod, f) << code;
    }
  }
}

TEST(TauKPoly, Examples) {
  EXPECT_EQ(tau_k_poly(factor_poly(P(2, {0, 0, 1}), table2()), 2), 3);
  EXPECT_EQ(tau_k_poly(factor_poly(P(2, {0, 1, 1}), table2()), 2), 4);
  EXPECT_EQ(tau_k_poly(factor_poly(P(2, {1, 1, 1}), table2()), 2), 2);
}

TEST(TauKPoly, MatchesOrderedTupleCount) {
  std::vector<std::vector<oracle::Poly>> monics;
  for (int d = 0; d <= 8; ++d) monics.push_back(oracle::monic(2, d));
  for (int n = 0; n <= 8; ++n) {
    for (const auto& f : monics[static_cast<std::size_t>(n)]) {
      std::uint64_t code = 0;
      for (std::size_t i = f.size(); i-- > 0;) code = code * 2 + static_cast<std::uint64_t>(f[i]);
      const auto fp = factor_poly(PolyQ::from_code(2, code), table2());
      // k = 2: divisors; k = 3: pairs (D1, D2) with D1 D2 | F
      long divisors = 0, pairs = 0;
      for (int a = 0; a <= n; ++a) {
        for (const auto& d1 : monics[static_cast<std::size_t>(a)]) {
          if (!oracle::divides(d1, f, 2)) continue;
          ++divisors;
          for (int b = 0; a + b <= n; ++b) {
            for (const auto& d2 : monics[static_cast<std::size_t>(b)]) pairs += oracle::divides(oracle::multiply(d1, d2, 2), f, 2) ? 1 : 0;
          }
        }
      }
      ASSERT_EQ(tau_k_poly(fp, 2), divisors) << code;
      ASSERT_EQ(tau_k_poly(fp, 3), pairs) << code;
    }
  }
}

TEST(PolyLhs, HandOracles) {
  EXPECT_EQ(exact_lhs_poly(2, 2, 2, {make_rational(1, 2)}, table2()), make_rational(31, 48));
  EXPECT_EQ(exact_lhs_poly(2, 1, 2, {Rational(0)}, table2()), make_rational(1, 2));
  for (std::uint32_t q : {2u, 3u, 5u}) {
    for (int n : {0, 1, 4, 7}) EXPECT_EQ(exact_lhs_poly(q, n, 2, {Rational(1)}, build_irreducibles(q, 4)), 1) << q << ' ' << n;
  }
}

TEST(PolyLhs, BruteForceOracle) {
  for (std::uint32_t q : {2u, 3u}) {
    const auto t = build_irreducibles(q, 3);
    for (int n = 1; n <= (q == 2 ? 6 : 4); ++n) {
      for (int a = 0; a <= 10; ++a) {
        const auto u = make_rational(a, 10);
        ASSERT_EQ(exact_lhs_poly(q, n, 2, {u}, t), oracle::polys_lhs_k2(static_cast<int>(q), n, u)) << q << ' ' << n << ' ' << a;
      }
    }
  }
}

TEST(PolyLhs, EnumerationCompleteness) {
  for (auto [q, max_n] : {std::pair{2u, 12}, {3u, 12}}) {
    const auto t = build_irreducibles(q, 6);
    for (int n = 0; n <= max_n; ++n) {
      const PolyLhsTable lhs(q, n, 2, t);
      EXPECT_EQ(lhs.enumerated(), upow(q, n)) << q << ' ' << n;
    }
  }
}

TEST(PolyLhs, ShardsAgree) {
  const auto t = build_irreducibles(3, 5);
  const PolyLhsTable a(3, 9, 3, t, 1), b(3, 9, 3, t, 4);
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; i + j <= 10; ++j) {
      const std::vector<Rational> u{make_rational(i, 10), make_rational(j, 10)};
      ASSERT_EQ(a.lhs(u), b.lhs(u));
    }
  }
}

TEST(PolyLhs, MonotoneAndGuards) {
  const auto t = build_irreducibles(2, 5);
  const PolyLhsTable lhs(2, 10, 3, t);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; i + j < 10; ++j) {
      const auto base = lhs.lhs({make_rational(i, 10), make_rational(j, 10)});
      EXPECT_LE(base, lhs.lhs({make_rational(i + 1, 10), make_rational(j, 10)}));
      EXPECT_LE(base, lhs.lhs({make_rational(i, 10), make_rational(j + 1, 10)}));
    }
  }
  EXPECT_THROW(PolyLhsTable(2, 24, 2, build_irreducibles(2, 12)), resource_error);
  EXPECT_THROW(exact_lhs_poly(2, 10, 2, {Rational(1)}, build_irreducibles(2, 3)), domain_error);
}

TEST(DeviationPoly, Examples) {
  const auto r1 = deviation_poly(2, 1, 2, 0.1, table2());
  for (const auto& row : r1.rows) {
    EXPECT_TRUE(row.empirical == 0.0 || row.empirical == 0.5 || row.empirical == 1.0);
  }
  const double small = deviation_poly(2, 4, 2, 0.05, table2()).sup_dev;
  const double large = deviation_poly(2, 16, 2, 0.05, table2()).sup_dev;
  EXPECT_LT(large, small);
  EXPECT_EQ(exact_lhs_poly(2, 9, 2, {Rational(1)}, table2()), 1);
  const auto r = deviation_poly(2, 8, 3, 0.25, table2());
  EXPECT_NEAR(r.scaled_sup_dev, r.sup_dev * std::cbrt(8.0), 1e-15);
}

TEST(IrreducibleCache, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "dirlaw_test_cache_poly";
  std::filesystem::remove_all(dir);
  ::setenv("DIRLAW_CACHE", dir.c_str(), 1);
  const auto built = cached_irreducibles(3, 5);
  const auto file = dir / "irr_q3_d5.bin";
  ASSERT_TRUE(std::filesystem::exists(file));
  std::uintmax_t expected = 4 + 4 + 4;
  for (int d = 1; d <= 5; ++d) expected += 8 + 8 * necklace_count(3, d);
  EXPECT_EQ(std::filesystem::file_size(file), expected);
  const auto loaded = read_irreducibles(file);
  ASSERT_TRUE(loaded.has_value());
  EXPECT_EQ(loaded->by_degree, built.by_degree);
  ::unsetenv("DIRLAW_CACHE");
  std::filesystem::remove_all(dir);
}
