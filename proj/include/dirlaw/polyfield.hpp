#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dirlaw/arith.hpp"
#include "dirlaw/dirichlet.hpp"
#include "dirlaw/errors.hpp"
#include "dirlaw/rational.hpp"
#include "dirlaw/report.hpp"

namespace dirlaw::poly {

inline bool is_small_prime(std::uint32_t q) {
  if (q < 2) return false;
  for (std::uint32_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) return false;
  }
  return true;
}

inline std::uint32_t inverse_mod(std::uint32_t a, std::uint32_t q) {
  // q is prime: a^(q-2)
  std::uint64_t result = 1, base = a % q;
  for (std::uint32_t e = q - 2; e > 0; e >>= 1) {
    if (e & 1U) result = result * base % q;
    base = base * base % q;
  }
  return static_cast<std::uint32_t>(result);
}

/// Polynomial over the prime field F_q, coefficients lowest degree first.
/// The zero polynomial has no coefficients.
class PolyQ {
 public:
  PolyQ() = default;
  PolyQ(std::uint32_t q, std::vector<std::uint32_t> coeffs) : q_(q), coeffs_(std::move(coeffs)) {
    detail::require(is_small_prime(q), "PolyQ: q must be prime");
    for (auto& c : coeffs_) c %= q_;
    trim();
  }

  static PolyQ from_code(std::uint32_t q, std::uint64_t code) {
    std::vector<std::uint32_t> c;
    while (code > 0) {
      c.push_back(static_cast<std::uint32_t>(code % q));
      code /= q;
    }
    return PolyQ(q, std::move(c));
  }

  /// Base-q integer sum c_i q^i; monic polynomials of degree d occupy [q^d, 2 q^d).
  std::uint64_t code() const {
    std::uint64_t out = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) out = out * q_ + coeffs_[i];
    return out;
  }

  std::uint32_t q() const { return q_; }
  const std::vector<std::uint32_t>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }
  std::uint32_t lead() const { return coeffs_.empty() ? 0 : coeffs_.back(); }

  friend bool operator==(const PolyQ&, const PolyQ&) = default;

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::uint32_t q_ = 2;
  std::vector<std::uint32_t> coeffs_;
};

inline PolyQ poly_mul(const PolyQ& a, const PolyQ& b) {
  if (a.q() != b.q()) throw domain_error("poly_mul: mismatched fields");
  if (a.is_zero() || b.is_zero()) return PolyQ(a.q(), {});
  const std::uint64_t q = a.q();
  std::vector<std::uint64_t> acc(a.coeffs().size() + b.coeffs().size() - 1, 0);
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs().size(); ++j) acc[i + j] = (acc[i + j] + a.coeffs()[i] * std::uint64_t{b.coeffs()[j]}) % q;
  }
  std::vector<std::uint32_t> out(acc.begin(), acc.end());
  return PolyQ(a.q(), std::move(out));
}

inline std::pair<PolyQ, PolyQ> poly_divrem(const PolyQ& a, const PolyQ& b) {
  if (a.q() != b.q()) throw domain_error("poly_divrem: mismatched fields");
  if (b.is_zero()) throw domain_error("poly_divrem: division by zero polynomial");
  const std::uint64_t q = a.q();
  std::vector<std::uint32_t> rem = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {PolyQ(a.q(), {}), a};
  std::vector<std::uint32_t> quot(static_cast<std::size_t>(a.degree() - db + 1), 0);
  const std::uint64_t inv = inverse_mod(b.lead(), a.q());
  for (int i = a.degree(); i >= db; --i) {
    const std::uint64_t c = rem[static_cast<std::size_t>(i)] * inv % q;
    quot[static_cast<std::size_t>(i - db)] = static_cast<std::uint32_t>(c);
    if (c == 0) continue;
    for (int j = 0; j <= db; ++j) {
      auto& r = rem[static_cast<std::size_t>(i - db + j)];
      r = static_cast<std::uint32_t>((r + q * q - c * b.coeffs()[static_cast<std::size_t>(j)] % q) % q);
    }
  }
  return {PolyQ(a.q(), std::move(quot)), PolyQ(a.q(), std::move(rem))};
}

/// Multiplication directly on base-q codes (carry-less for q = 2).
class CodeArith {
 public:
  explicit CodeArith(std::uint32_t q) : q_(q) {}

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    if (q_ == 2) {
      std::uint64_t out = 0;
      while (b != 0) {
        if (b & 1U) out ^= a;
        a <<= 1;
        b >>= 1;
      }
      return out;
    }
    std::uint32_t da[64], db[64];
    int na = digits(a, da), nb = digits(b, db);
    std::uint32_t acc[128] = {};
    for (int i = 0; i < na; ++i) {
      if (da[i] == 0) continue;
      for (int j = 0; j < nb; ++j) acc[i + j] = (acc[i + j] + da[i] * db[j]) % q_;
    }
    std::uint64_t out = 0;
    for (int i = na + nb - 2; i >= 0; --i) out = out * q_ + acc[i];
    return out;
  }

  int degree(std::uint64_t code) const {
    int d = -1;
    while (code > 0) {
      code /= q_;
      ++d;
    }
    return d;
  }

 private:
  int digits(std::uint64_t c, std::uint32_t* out) const {
    int n = 0;
    while (c > 0) {
      out[n++] = static_cast<std::uint32_t>(c % q_);
      c /= q_;
    }
    return n;
  }

  std::uint32_t q_;
};

inline std::uint64_t upow(std::uint64_t base, int e) {
  std::uint64_t out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

inline int mobius(int n) {
  int out = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    out = -out;
  }
  if (n > 1) out = -out;
  return out;
}

/// (1/d) sum_{e | d} mu(e) q^{d/e}
inline std::uint64_t necklace_count(std::uint32_t q, int d) {
  std::int64_t sum = 0;
  for (int e = 1; e <= d; ++e) {
    if (d % e == 0) sum += mobius(e) * static_cast<std::int64_t>(upow(q, d / e));
  }
  return static_cast<std::uint64_t>(sum / d);
}

struct IrreducibleTable {
  std::uint32_t q = 2;
  int max_deg = 0;
  std::vector<std::vector<std::uint64_t>> by_degree;  // index d holds degree-d codes, ascending

  std::size_t count(int d) const { return by_degree.at(static_cast<std::size_t>(d)).size(); }
};

/// Sieve over monic codes: every product of an irreducible of degree
/// <= d/2 with a monic cofactor is marked composite; the rest of degree d
/// are irreducible. Counts are checked against the necklace formula.
inline IrreducibleTable build_irreducibles(std::uint32_t q, int max_deg) {
  detail::require(is_small_prime(q) && q <= 13, "build_irreducibles: q must be a prime <= 13");
  detail::require(max_deg >= 1, "build_irreducibles: max_deg must be at least 1");
  double size = 1.0;
  for (int i = 0; i < max_deg; ++i) size *= q;
  if (size > 1e8) throw resource_error("build_irreducibles: q^max_deg exceeds 10^8");
  const CodeArith ar(q);
  IrreducibleTable t;
  t.q = q;
  t.max_deg = max_deg;
  t.by_degree.resize(static_cast<std::size_t>(max_deg) + 1);
  const std::uint64_t top = 2 * upow(q, max_deg);
  std::vector<bool> composite(top, false);
  for (int d = 1; d <= max_deg; ++d) {
    const std::uint64_t lo = upow(q, d), hi = 2 * lo;
    for (std::uint64_t c = lo; c < hi; ++c) {
      if (!composite[c]) t.by_degree[static_cast<std::size_t>(d)].push_back(c);
    }
    // mark multiples of the new irreducibles: P * M with deg M >= d, deg P + deg M <= max_deg
    for (std::uint64_t p : t.by_degree[static_cast<std::size_t>(d)]) {
      for (int e = d; d + e <= max_deg; ++e) {
        const std::uint64_t mlo = upow(q, e);
        for (std::uint64_t m = mlo; m < 2 * mlo; ++m) composite[ar.mul(p, m)] = true;
      }
    }
  }
  for (int d = 1; d <= max_deg; ++d) {
    if (t.count(d) != necklace_count(q, d)) {
      throw integrity_error("irreducible count mismatch at degree " + std::to_string(d));
    }
  }
  return t;
}

/// Irreducible factor with multiplicity.
struct PolyFactor {
  PolyQ factor;
  int exponent = 0;
};

struct FactoredPoly {
  PolyQ poly;
  std::vector<PolyFactor> factors;  // (degree, code) order
};

/// Trial division by table entries in (degree, code) order while
/// 2 deg P <= deg of the remaining cofactor; a leftover of positive degree
/// is irreducible.
inline FactoredPoly factor_poly(const PolyQ& f, const IrreducibleTable& table) {
  detail::require(f.is_monic(), "factor_poly: polynomial must be monic");
  detail::require(f.q() == table.q, "factor_poly: field mismatch with table");
  detail::require(2 * table.max_deg >= f.degree() - 1, "factor_poly: table does not reach deg(f)/2");
  FactoredPoly out{f, {}};
  PolyQ rest = f;
  for (int d = 1; d <= table.max_deg && 2 * d <= rest.degree(); ++d) {
    for (std::uint64_t code : table.by_degree[static_cast<std::size_t>(d)]) {
      if (2 * d > rest.degree()) break;
      const PolyQ p = PolyQ::from_code(table.q, code);
      int e = 0;
      for (;;) {
        auto [quot, rem] = poly_divrem(rest, p);
        if (!rem.is_zero()) break;
        rest = std::move(quot);
        ++e;
      }
      if (e > 0) out.factors.push_back({p, e});
    }
  }
  if (rest.degree() > 0) {
    // may equal an already-found factor of the same degree only if it was
    // skipped; trial division stops at deg/2, so rest is a new irreducible
    out.factors.push_back({rest, 1});
  }
  std::sort(out.factors.begin(), out.factors.end(), [](const PolyFactor& a, const PolyFactor& b) {
    return std::pair(a.factor.degree(), a.factor.code()) < std::pair(b.factor.degree(), b.factor.code());
  });
  return out;
}

inline BigInt tau_k_poly(const FactoredPoly& fp, int k) {
  detail::require(k >= 1, "tau_k_poly needs k >= 1");
  BigInt out = 1;
  for (const auto& f : fp.factors) {
    out *= binomial(static_cast<unsigned long>(f.exponent + k - 1), static_cast<unsigned long>(k - 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive evaluation over M_q(n)

inline constexpr double kMaxEnumeration = 1e7;

/// Smallest-irreducible-factor table over all monic codes of degree <= n,
/// seeded from the irreducibles of degree <= n/2. Unmarked monic codes of
/// positive degree are irreducible.
class FactorSieve {
 public:
  FactorSieve(const IrreducibleTable& table, int n) : q_(table.q), n_(n) {
    detail::require(2 * table.max_deg >= n - 1, "irreducible table must reach degree n/2");
    const CodeArith ar(q_);
    const std::uint64_t top = 2 * upow(q_, n);
    smallest_.assign(top, 0);
    cofactor_.assign(top, 0);
    for (int d = 1; 2 * d <= n; ++d) {
      for (std::uint64_t p : table.by_degree[static_cast<std::size_t>(d)]) {
        for (int e = d; d + e <= n; ++e) {
          const std::uint64_t mlo = upow(q_, e);
          for (std::uint64_t m = mlo; m < 2 * mlo; ++m) {
            const std::uint64_t c = ar.mul(p, m);
            if (smallest_[c] == 0) {
              smallest_[c] = static_cast<std::uint32_t>(p);
              cofactor_[c] = static_cast<std::uint32_t>(m);
            }
          }
        }
      }
    }
  }

  /// (degree, exponent) of each distinct irreducible factor, in (degree, code) order.
  void shape(std::uint64_t code, std::vector<std::pair<int, int>>& out) const {
    out.clear();
    std::uint64_t last = 0;
    const CodeArith ar(q_);
    while (code > 1) {
      std::uint64_t p = smallest_[code];
      std::uint64_t next = cofactor_[code];
      if (p == 0) {
        p = code;
        next = 1;
      }
      if (p == last) {
        ++out.back().second;
      } else {
        out.emplace_back(ar.degree(p), 1);
        last = p;
      }
      code = next;
    }
  }

 private:
  std::uint32_t q_;
  int n_;
  std::vector<std::uint32_t> smallest_;
  std::vector<std::uint32_t> cofactor_;
};

/// Divisor-degree statistics of M_q(n), grouped by factorization shape.
/// For each shape (multiset of (deg, exponent)) it stores how many F have
/// that shape, tau_k(F), and the cumulative count of ordered tuples
/// (D_1, ..., D_{k-1}) with D_1 ... D_{k-1} | F by their degree vector.
class PolyLhsTable {
 public:
  PolyLhsTable(std::uint32_t q, int n, int k, const IrreducibleTable& table, int shards = 1) : q_(q), n_(n), k_(k) {
    detail::require(k >= 2, "k must be at least 2");
    detail::require(n >= 0, "n must be non-negative");
    detail::require(table.q == q, "irreducible table field mismatch");
    double size = 1.0;
    for (int i = 0; i < n; ++i) size *= q;
    if (size > kMaxEnumeration) throw resource_error("q^n exceeds 10^7");
    const std::uint64_t lo = upow(q, n);
    std::map<Shape, std::uint64_t> counts;
    if (n == 0) {
      counts[{}] = 1;
    } else {
      const FactorSieve sieve(table, n);
      const auto nshards = static_cast<std::uint64_t>(std::max(1, shards));
      std::vector<std::map<Shape, std::uint64_t>> parts(nshards);
      auto work = [&](std::uint64_t s) {
        Shape sh;
        for (std::uint64_t c = lo + s * lo / nshards; c < lo + (s + 1) * lo / nshards; ++c) {
          sieve.shape(c, sh);
          ++parts[s][sh];
        }
      };
      if (nshards == 1) {
        work(0);
      } else {
        std::vector<std::thread> threads;
        for (std::uint64_t s = 0; s < nshards; ++s) threads.emplace_back(work, s);
        for (auto& t : threads) t.join();
      }
      for (const auto& part : parts) {
        for (const auto& [sh, cnt] : part) counts[sh] += cnt;
      }
    }
    enumerated_ = 0;
    for (const auto& [sh, cnt] : counts) {
      enumerated_ += cnt;
      shapes_.push_back(build_entry(sh, cnt));
    }
  }

  std::uint32_t q() const { return q_; }
  int n() const { return n_; }
  int k() const { return k_; }
  std::uint64_t enumerated() const { return enumerated_; }
  std::size_t shape_count() const { return shapes_.size(); }

  /// q^{-n} sum_F tau_k(F)^{-1} #{(D_1..D_{k-1}) : deg D_i <= floor(n u_i)}
  Rational lhs(const std::vector<Rational>& u) const {
    detail::require(static_cast<int>(u.size()) == k_ - 1, "rect must have k-1 coordinates");
    std::vector<int> bound;
    for (const auto& ui : u) {
      detail::require(ui >= 0, "rect coordinates must be non-negative");
      bound.push_back(static_cast<int>(std::min<std::int64_t>(floor_mul(n_, ui), n_)));
    }
    std::size_t idx = 0;
    for (int b : bound) idx = idx * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(b);
    Rational sum = 0;
    for (const auto& e : shapes_) sum += Rational(BigInt(static_cast<unsigned long>(e.count)) * e.cumulative[idx], e.tau);
    sum /= Rational(BigInt(static_cast<unsigned long>(upow(q_, n_))));
    sum.canonicalize();
    return sum;
  }

 private:
  using Shape = std::vector<std::pair<int, int>>;

  struct Entry {
    std::uint64_t count = 0;
    BigInt tau;
    std::vector<BigInt> cumulative;  // (n+1)^{k-1} cells, row-major
  };

  Entry build_entry(const Shape& sh, std::uint64_t count) const {
    Entry e;
    e.count = count;
    e.tau = 1;
    for (auto [deg, ex] : sh) e.tau *= binomial(static_cast<unsigned long>(ex + k_ - 1), static_cast<unsigned long>(k_ - 1));
    const auto dims = static_cast<std::size_t>(k_ - 1);
    const auto side = static_cast<std::size_t>(n_ + 1);
    std::size_t cells = 1;
    for (std::size_t a = 0; a < dims; ++a) cells *= side;
    std::vector<std::uint64_t> raw(cells, 0);
    // every irreducible power P^ex splits as a composition (v_1..v_k) of ex;
    // only the first k-1 degrees are tracked
    std::vector<int> deg(dims, 0);
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == sh.size()) {
        std::size_t idx = 0;
        for (int dgr : deg) idx = idx * side + static_cast<std::size_t>(dgr);
        ++raw[idx];
        return;
      }
      const auto [d, ex] = sh[i];
      arith::for_each_composition(ex, k_, [&](const std::vector<int>& c) {
        for (std::size_t a = 0; a < dims; ++a) deg[a] += d * c[a];
        self(self, i + 1);
        for (std::size_t a = 0; a < dims; ++a) deg[a] -= d * c[a];
      });
    };
    rec(rec, 0);
    // prefix sums along each axis
    std::size_t stride = 1;
    for (std::size_t a = dims; a-- > 0;) {
      for (std::size_t i = 0; i < cells; ++i) {
        if ((i / stride) % side != 0) raw[i] += raw[i - stride];
      }
      stride *= side;
    }
    e.cumulative.reserve(cells);
    for (auto v : raw) e.cumulative.emplace_back(static_cast<unsigned long>(v));
    return e;
  }

  std::uint32_t q_;
  int n_;
  int k_;
  std::uint64_t enumerated_ = 0;
  std::vector<Entry> shapes_;
};

inline Rational exact_lhs_poly(std::uint32_t q, int n, int k, const std::vector<Rational>& u, const IrreducibleTable& table) {
  return PolyLhsTable(q, n, k, table).lhs(u);
}

inline DeviationReport deviation_poly(std::uint32_t q, int n, int k, double grid_step, const IrreducibleTable& table,
                                      double tol = 1e-10, int shards = 1) {
  const PolyLhsTable lhs(q, n, k, table, shards);
  const auto grid = make_rect_grid(k, grid_step);
  const auto params = dirichlet::DirichletParams::symmetric(k, 1.0 / k);
  DeviationReport report;
  report.kind = "polys";
  report.scale = n;
  report.k = k;
  report.model = "uniform";
  report.grid_step = grid_step;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    auto u = grid.as_double(i);
    const double limit = dirichlet::cdf(params, {u}, tol);
    report.add(std::move(u), lhs.lhs(grid.as_rational(i)).get_d(), limit);
  }
  report.scaled_sup_dev = report.sup_dev * std::pow(static_cast<double>(n), 1.0 / k);
  return report;
}

// ---------------------------------------------------------------------------
// Cache: irr_q<q>_d<maxdeg>.bin = "IRR1", q (u32), max_deg (u32), then for
// d = 1..max_deg a u64 count followed by that many u64 codes.

inline std::filesystem::path irreducible_cache_name(std::uint32_t q, int max_deg) {
  return "irr_q" + std::to_string(q) + "_d" + std::to_string(max_deg) + ".bin";
}

inline void write_irreducibles(const IrreducibleTable& t, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw resource_error("cannot write irreducible cache " + file.string());
  os.write("IRR1", 4);
  arith::detail_io::put_u32(os, t.q);
  arith::detail_io::put_u32(os, static_cast<std::uint32_t>(t.max_deg));
  for (int d = 1; d <= t.max_deg; ++d) {
    arith::detail_io::put_u64(os, t.count(d));
    for (auto c : t.by_degree[static_cast<std::size_t>(d)]) arith::detail_io::put_u64(os, c);
  }
}

inline std::optional<IrreducibleTable> read_irreducibles(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "IRR1") return std::nullopt;
  std::uint32_t q = 0, max_deg = 0;
  if (!arith::detail_io::get_u32(is, q) || !arith::detail_io::get_u32(is, max_deg)) return std::nullopt;
  if (!is_small_prime(q) || max_deg < 1 || max_deg > 64) return std::nullopt;
  IrreducibleTable t;
  t.q = q;
  t.max_deg = static_cast<int>(max_deg);
  t.by_degree.resize(max_deg + 1);
  for (std::uint32_t d = 1; d <= max_deg; ++d) {
    std::uint64_t count = 0;
    if (!arith::detail_io::get_u64(is, count) || count != necklace_count(q, static_cast<int>(d))) return std::nullopt;
    auto& list = t.by_degree[d];
    list.resize(count);
    for (auto& c : list) {
      if (!arith::detail_io::get_u64(is, c)) return std::nullopt;
    }
  }
  return t;
}

inline IrreducibleTable cached_irreducibles(std::uint32_t q, int max_deg) {
  auto dir = arith::cache_dir();
  if (!dir) return build_irreducibles(q, max_deg);
  const auto file = *dir / irreducible_cache_name(q, max_deg);
  if (auto loaded = read_irreducibles(file)) return std::move(*loaded);
  auto t = build_irreducibles(q, max_deg);
  write_irreducibles(t, file);
  return t;
}

}  // namespace dirlaw::poly
