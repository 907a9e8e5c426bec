#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dirlaw/errors.hpp"

namespace dirlaw {

using BigInt = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Parses "p/q", an integer, or a finite decimal ("0.05", "1e-2") into an
/// exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw domain_error("empty rational literal");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    BigInt num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0)
      throw domain_error("malformed rational: " + s);
    if (den == 0) throw domain_error("zero denominator: " + s);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    try {
      exponent = std::stol(s.substr(e + 1));
    } catch (...) {
      throw domain_error("malformed exponent: " + s);
    }
    s.resize(e);
  }
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) throw domain_error("malformed decimal: " + std::string(text));
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_dot) ++frac_digits;
    } else {
      throw domain_error("malformed number: " + std::string(text));
    }
  }
  if (digits.empty()) throw domain_error("malformed number: " + std::string(text));
  BigInt num(digits, 10);
  if (negative) num = -num;
  long shift = exponent - frac_digits;
  BigInt ten = 10;
  BigInt scale;
  mpz_pow_ui(scale.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational r = shift >= 0 ? Rational(num * scale) : Rational(num, scale);
  r.canonicalize();
  return r;
}

inline std::vector<Rational> parse_rational_list(std::string_view text) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_rational(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_str();
}

inline BigInt ipow(const BigInt& base, unsigned long e) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

inline BigInt binomial(unsigned long n, unsigned long k) {
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

inline BigInt factorial(unsigned long n) {
  BigInt out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

/// floor(n * u) for a non-negative rational u.
inline std::int64_t floor_mul(std::int64_t n, const Rational& u) {
  BigInt prod = BigInt(static_cast<long>(n)) * u.get_num();
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), prod.get_mpz_t(), u.get_den().get_mpz_t());
  return q.get_si();
}

/// C(m + a - 1, m) as the rising product prod_{j=1}^m (a + j - 1) / j.
inline Rational rising_binomial(const Rational& a, unsigned long m) {
  Rational out = 1;
  for (unsigned long j = 1; j <= m; ++j) {
    out *= (a + Rational(static_cast<long>(j) - 1)) / Rational(static_cast<long>(j));
  }
  return out;
}

}  // namespace dirlaw
