#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirlaw/errors.hpp"
#include "dirlaw/rational.hpp"

namespace dirlaw::arith {

inline constexpr std::uint64_t kMaxSieveLimit = 100'000'000;

/// Smallest-prime-factor table on [0, limit]; entries 0 and 1 are 0.
class SpfSieve {
 public:
  SpfSieve() = default;

  explicit SpfSieve(std::uint64_t limit) : limit_(limit) {
    if (limit < 1) throw domain_error("sieve limit must be at least 1");
    if (limit > kMaxSieveLimit) throw resource_error("sieve limit exceeds 10^8");
    spf_.assign(limit + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
      if (spf_[i] != 0) continue;
      spf_[i] = static_cast<std::uint32_t>(i);
      for (std::uint64_t j = i * i; j <= limit; j += i) {
        if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
      }
    }
  }

  static SpfSieve from_table(std::vector<std::uint32_t> spf) {
    SpfSieve s;
    if (spf.size() < 2) throw integrity_error("sieve table too short");
    s.limit_ = spf.size() - 1;
    s.spf_ = std::move(spf);
    return s;
  }

  std::uint64_t limit() const { return limit_; }
  std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }
  bool is_prime(std::uint64_t n) const { return n >= 2 && n <= limit_ && spf_[n] == n; }
  const std::vector<std::uint32_t>& table() const { return spf_; }

  std::vector<std::uint32_t> primes_up_to(std::uint64_t bound) const {
    std::vector<std::uint32_t> out;
    for (std::uint64_t n = 2; n <= std::min(bound, limit_); ++n) {
      if (spf_[n] == n) out.push_back(static_cast<std::uint32_t>(n));
    }
    return out;
  }

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> spf_;
};

inline SpfSieve build_spf_sieve(std::uint64_t x) { return SpfSieve(x); }

struct PrimePower {
  std::uint32_t p = 0;
  int v = 0;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct FactoredInteger {
  std::uint64_t n = 1;
  std::vector<PrimePower> factors;
};

inline FactoredInteger factorize(std::uint64_t n, const SpfSieve& sieve) {
  if (n < 1 || n > sieve.limit()) throw domain_error("factorize: n outside sieve range");
  FactoredInteger out{n, {}};
  while (n > 1) {
    const std::uint32_t p = sieve.spf(n);
    int v = 0;
    while (n % p == 0) {
      n /= p;
      ++v;
    }
    out.factors.push_back({p, v});
  }
  return out;
}

/// tau_k(n) = prod_p C(v + k - 1, k - 1)
inline BigInt tau_k(const FactoredInteger& fn, int k) {
  detail::require(k >= 1, "tau_k needs k >= 1");
  BigInt out = 1;
  for (const auto& pp : fn.factors) {
    out *= binomial(static_cast<unsigned long>(pp.v + k - 1), static_cast<unsigned long>(k - 1));
  }
  return out;
}

/// C(v + lambda - 1, v) for real lambda.
inline double tau_real_local(int v, double lambda) {
  double out = 1.0;
  for (int j = 1; j <= v; ++j) out *= (lambda + j - 1) / j;
  return out;
}

inline double tau_real(const FactoredInteger& fn, double lambda) {
  detail::require(lambda > 0.0, "tau_real needs lambda > 0");
  double out = 1.0;
  for (const auto& pp : fn.factors) out *= tau_real_local(pp.v, lambda);
  return out;
}

inline bool indicator_two_squares(const FactoredInteger& fn) {
  for (const auto& pp : fn.factors) {
    if (pp.p % 4 == 3 && pp.v % 2 != 0) return false;
  }
  return true;
}

inline bool indicator_squarefree(const FactoredInteger& fn) {
  for (const auto& pp : fn.factors) {
    if (pp.v > 1) return false;
  }
  return true;
}

/// Visits every composition (v_1, ..., v_k) of v with k non-negative parts
/// in lexicographically descending order of v_1, then v_2, ...
template <typename Visitor>
void for_each_composition(int v, int k, Visitor&& visit) {
  std::vector<int> parts(static_cast<std::size_t>(k), 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == k - 1) {
      parts[static_cast<std::size_t>(pos)] = remaining;
      visit(static_cast<const std::vector<int>&>(parts));
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      parts[static_cast<std::size_t>(pos)] = a;
      self(self, pos + 1, remaining - a);
    }
  };
  rec(rec, 0, v);
}

/// All compositions of v into k parts, for v = 0..max_v.
class CompositionTable {
 public:
  CompositionTable(int k, int max_v) : k_(k) {
    lists_.resize(static_cast<std::size_t>(max_v) + 1);
    for (int v = 0; v <= max_v; ++v) {
      for_each_composition(v, k, [&](const std::vector<int>& c) { lists_[static_cast<std::size_t>(v)].push_back(c); });
    }
  }
  int k() const { return k_; }
  int max_v() const { return static_cast<int>(lists_.size()) - 1; }
  const std::vector<std::vector<int>>& of(int v) const { return lists_.at(static_cast<std::size_t>(v)); }

 private:
  int k_;
  std::vector<std::vector<std::vector<int>>> lists_;
};

// ---------------------------------------------------------------------------
// Disk cache for the sieve: "SPF1", limit (u64 LE), then limit+1 u32 LE entries.

namespace detail_io {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline bool get_u32(std::istream& is, std::uint32_t& v) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
  v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return true;
}

inline bool get_u64(std::istream& is, std::uint64_t& v) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return true;
}

}  // namespace detail_io

/// Directory named by DIRLAW_CACHE, created if absent; nullopt when unset.
inline std::optional<std::filesystem::path> cache_dir() {
  const char* env = std::getenv("DIRLAW_CACHE");
  if (env == nullptr || *env == '\0') return std::nullopt;
  std::filesystem::path dir(env);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return std::nullopt;
  return dir;
}

inline void write_sieve(const SpfSieve& sieve, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw resource_error("cannot write sieve cache " + file.string());
  os.write("SPF1", 4);
  detail_io::put_u64(os, sieve.limit());
  for (std::uint32_t v : sieve.table()) detail_io::put_u32(os, v);
}

inline std::optional<SpfSieve> read_sieve(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SPF1", 4) != 0) return std::nullopt;
  std::uint64_t limit = 0;
  if (!detail_io::get_u64(is, limit) || limit < 1 || limit > kMaxSieveLimit) return std::nullopt;
  std::vector<std::uint32_t> table(limit + 1);
  for (auto& v : table) {
    if (!detail_io::get_u32(is, v)) return std::nullopt;
  }
  return SpfSieve::from_table(std::move(table));
}

inline std::filesystem::path sieve_cache_name(std::uint64_t x) { return "spf_" + std::to_string(x) + ".bin"; }

/// Loads spf_<x>.bin from DIRLAW_CACHE when present, else builds (and stores).
inline SpfSieve cached_sieve(std::uint64_t x) {
  auto dir = cache_dir();
  if (!dir) return SpfSieve(x);
  const auto file = *dir / sieve_cache_name(x);
  if (auto loaded = read_sieve(file)) return std::move(*loaded);
  SpfSieve s(x);
  write_sieve(s, file);
  return s;
}

}  // namespace dirlaw::arith
