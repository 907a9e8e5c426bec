#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dirlaw/arith.hpp"
#include "dirlaw/dirichlet.hpp"
#include "dirlaw/errors.hpp"
#include "dirlaw/rational.hpp"

namespace dirlaw::arith {

enum class ModelKind { uniform, tau_weights, residues, two_squares, squarefree, coprime, nested };

/// Declared (beta, c, delta) bounds of the weight class; stored, not verified
/// beyond the divisor-bound spot check.
struct BoundMetadata {
  std::vector<double> beta;
  std::vector<double> c;
  std::vector<double> delta;
};

/// A pair (f; G) of multiplicative weights given by per-prime-power data,
/// together with its predicted limit law Dir(alpha) and theta = sum alpha.
class WeightModel {
 public:
  static WeightModel uniform(int k) {
    WeightModel m(ModelKind::uniform, k, "uniform");
    m.theta_ = 1;
    m.alpha_.assign(static_cast<std::size_t>(k), make_rational(1, k));
    m.meta_ = {std::vector<double>(static_cast<std::size_t>(k), 1.0 / k), std::vector<double>(static_cast<std::size_t>(k), 1.0),
               std::vector<double>(static_cast<std::size_t>(k), 0.0)};
    return m;
  }

  /// f = tau_theta, G = prod_j tau_{lambda_j}(d_j); k = number of lambdas.
  static WeightModel tau_weights(const Rational& theta, std::vector<Rational> lambda) {
    const int k = static_cast<int>(lambda.size());
    detail::require(k >= 2, "tau-weights needs at least two lambdas");
    detail::require(theta > 0, "tau-weights needs theta > 0");
    Rational total = 0;
    for (const auto& l : lambda) {
      detail::require(l > 0, "tau-weights needs lambda_j > 0");
      total += l;
    }
    std::ostringstream id;
    id << "tau-weights:" << to_string(theta) << ";";
    for (std::size_t j = 0; j < lambda.size(); ++j) id << (j ? "," : "") << to_string(lambda[j]);
    WeightModel m(ModelKind::tau_weights, k, id.str());
    m.theta_ = theta;
    for (const auto& l : lambda) m.alpha_.push_back(theta * l / total);
    m.lambda_ = std::move(lambda);
    m.meta_ = {std::vector<double>(static_cast<std::size_t>(k), theta.get_d()), std::vector<double>(static_cast<std::size_t>(k), 1.0),
               std::vector<double>(static_cast<std::size_t>(k), 1.0)};
    return m;
  }

  /// Coordinates indexed by the reduced residues mod q in ascending order.
  static WeightModel residues(int q) {
    detail::require(q == 3 || q == 4 || q == 5 || q == 8, "residues model supports q in {3,4,5,8}");
    std::vector<int> reduced;
    for (int a = 1; a < q; ++a) {
      if (std::gcd(a, q) == 1) reduced.push_back(a);
    }
    const int k = static_cast<int>(reduced.size());
    WeightModel m(ModelKind::residues, k, "residues:" + std::to_string(q));
    m.modulus_ = q;
    m.residues_ = std::move(reduced);
    m.theta_ = 1;
    m.alpha_.assign(static_cast<std::size_t>(k), make_rational(1, k));
    m.meta_ = {std::vector<double>(static_cast<std::size_t>(k), 1.0), std::vector<double>(static_cast<std::size_t>(k), 1.0),
               std::vector<double>(static_cast<std::size_t>(k), 1.0)};
    return m;
  }

  static WeightModel two_squares(int k) {
    WeightModel m(ModelKind::two_squares, k, "two-squares");
    m.theta_ = make_rational(1, 2);
    m.alpha_.assign(static_cast<std::size_t>(k), make_rational(1, 2 * k));
    m.meta_ = {std::vector<double>(static_cast<std::size_t>(k), 1.0 / k), std::vector<double>(static_cast<std::size_t>(k), 1.0),
               std::vector<double>(static_cast<std::size_t>(k), 1.0)};
    return m;
  }

  static WeightModel squarefree(int k) {
    WeightModel m(ModelKind::squarefree, k, "squarefree");
    m.theta_ = 1;
    m.alpha_.assign(static_cast<std::size_t>(k), make_rational(1, k));
    m.meta_ = {std::vector<double>(static_cast<std::size_t>(k), 1.0 / k), std::vector<double>(static_cast<std::size_t>(k), 1.0),
               std::vector<double>(static_cast<std::size_t>(k), 1.0)};
    return m;
  }

  /// G = 1 iff gcd(d_i, d_j) = 1 for every pair {i, j} not in `related`
  /// (1-based unordered pairs).
  static WeightModel coprime(int k, const std::vector<std::pair<int, int>>& related) {
    WeightModel m(ModelKind::coprime, k, "coprime");
    m.must_coprime_.assign(static_cast<std::size_t>(k), std::vector<bool>(static_cast<std::size_t>(k), true));
    std::ostringstream id;
    id << "coprime";
    bool first = true;
    for (auto [i, j] : related) {
      detail::require(i != j && i >= 1 && j >= 1 && i <= k && j <= k, "coprime pairs must be distinct 1-based indices <= k");
      m.must_coprime_[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = false;
      m.must_coprime_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)] = false;
      id << (first ? ":" : ",") << i << "-" << j;
      first = false;
    }
    m.id_ = id.str();
    m.theta_ = 1;
    m.alpha_.assign(static_cast<std::size_t>(k), make_rational(1, k));
    m.meta_ = {std::vector<double>(static_cast<std::size_t>(k), 1.0), std::vector<double>(static_cast<std::size_t>(k), 1.0),
               std::vector<double>(static_cast<std::size_t>(k), 1.0)};
    return m;
  }

  /// G = prod_{j=1}^{k-1} 1 / tau(d_j ... d_k)
  static WeightModel nested(int k) {
    WeightModel m(ModelKind::nested, k, "nested");
    m.theta_ = 1;
    for (int j = 1; j <= k - 1; ++j) {
      BigInt den = ipow(BigInt(2), static_cast<unsigned long>(j));
      m.alpha_.push_back(Rational(BigInt(1), den));
    }
    m.alpha_.push_back(m.alpha_.back());
    m.meta_ = {std::vector<double>(static_cast<std::size_t>(k), 1.0), std::vector<double>(static_cast<std::size_t>(k), 1.0),
               std::vector<double>(static_cast<std::size_t>(k), 1.0)};
    return m;
  }

  /// Parses "<id>[:params]". k comes from the caller except for residues
  /// (k = phi(q)) and tau-weights (k = number of lambdas).
  ///   uniform | squarefree | two-squares | nested
  ///   residues:<q>
  ///   coprime[:i-j,i-j,...]
  ///   tau-weights:<theta>;<l1>,<l2>,...
  static WeightModel parse(const std::string& spec, int k) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto need_k = [&] { detail::require(k >= 2, "model " + name + " needs --k >= 2"); };
    if (name == "uniform") return need_k(), uniform(k);
    if (name == "squarefree") return need_k(), squarefree(k);
    if (name == "two-squares") return need_k(), two_squares(k);
    if (name == "nested") return need_k(), nested(k);
    if (name == "residues") {
      detail::require(!params.empty(), "residues model needs a modulus, e.g. residues:4");
      return residues(std::stoi(params));
    }
    if (name == "coprime") {
      need_k();
      std::vector<std::pair<int, int>> related;
      std::stringstream ss(params);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dash = item.find('-');
        detail::require(dash != std::string::npos, "coprime pairs are written i-j");
        related.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
      }
      return coprime(k, related);
    }
    if (name == "tau-weights") {
      const auto semi = params.find(';');
      detail::require(semi != std::string::npos, "tau-weights syntax: tau-weights:<theta>;<l1>,<l2>,...");
      return tau_weights(parse_rational(params.substr(0, semi)), parse_rational_list(params.substr(semi + 1)));
    }
    throw domain_error("unknown model: " + spec);
  }

  ModelKind kind() const { return kind_; }
  int k() const { return k_; }
  const std::string& id() const { return id_; }
  const Rational& theta() const { return theta_; }
  const std::vector<Rational>& alpha_exact() const { return alpha_; }
  const BoundMetadata& metadata() const { return meta_; }

  dirichlet::DirichletParams predicted() const {
    std::vector<double> a;
    for (const auto& r : alpha_) a.push_back(r.get_d());
    return dirichlet::DirichletParams(std::move(a));
  }

  double min_exponent() const {
    double m = 1.0;
    for (const auto& r : alpha_) m = std::min(m, r.get_d());
    return m;
  }

  /// f takes values in [0, 1] (rejection sampling of n is possible).
  bool f_bounded_by_one() const { return kind_ != ModelKind::tau_weights || theta_ == 1; }

  Rational f_local_exact(std::uint32_t p, int v) const {
    if (v == 0) return 1;
    switch (kind_) {
      case ModelKind::tau_weights:
        return rising_binomial(theta_, static_cast<unsigned long>(v));
      case ModelKind::residues:
        return modulus_ % static_cast<int>(p) == 0 ? 0 : 1;
      case ModelKind::two_squares:
        return (p % 4 == 3 && v % 2 != 0) ? 0 : 1;
      case ModelKind::squarefree:
        return v > 1 ? 0 : 1;
      default:
        return 1;
    }
  }

  double f_local(std::uint32_t p, int v) const {
    if (v == 0) return 1.0;
    switch (kind_) {
      case ModelKind::tau_weights:
        return tau_real_local(v, theta_.get_d());
      default:
        return f_local_exact(p, v).get_d();
    }
  }

  /// Local value G(p^{v_1}, ..., p^{v_k}).
  Rational g_local_exact(std::uint32_t p, const std::vector<int>& comp) const {
    switch (kind_) {
      case ModelKind::tau_weights: {
        Rational out = 1;
        for (std::size_t j = 0; j < comp.size(); ++j) out *= rising_binomial(lambda_[j], static_cast<unsigned long>(comp[j]));
        return out;
      }
      case ModelKind::nested: {
        // prod_{j<k} 1 / (1 + v_j + ... + v_k)
        Rational out = 1;
        int suffix = 0;
        for (std::size_t j = comp.size(); j-- > 0;) {
          suffix += comp[j];
          if (j + 1 < comp.size()) out /= Rational(1 + suffix);
        }
        return out;
      }
      default:
        return g_indicator(p, comp) ? 1 : 0;
    }
  }

  double g_local(std::uint32_t p, const std::vector<int>& comp) const {
    switch (kind_) {
      case ModelKind::tau_weights: {
        double out = 1.0;
        for (std::size_t j = 0; j < comp.size(); ++j) out *= tau_real_local(comp[j], lambda_[j].get_d());
        return out;
      }
      case ModelKind::nested: {
        double out = 1.0;
        int suffix = 0;
        for (std::size_t j = comp.size(); j-- > 0;) {
          suffix += comp[j];
          if (j + 1 < comp.size()) out /= static_cast<double>(1 + suffix);
        }
        return out;
      }
      default:
        return g_indicator(p, comp) ? 1.0 : 0.0;
    }
  }

 private:
  WeightModel(ModelKind kind, int k, std::string id) : kind_(kind), k_(k), id_(std::move(id)) {
    detail::require(k >= 2, "weight model dimension k must be at least 2");
  }

  bool g_indicator(std::uint32_t p, const std::vector<int>& comp) const {
    switch (kind_) {
      case ModelKind::residues:
        for (std::size_t j = 0; j < comp.size(); ++j) {
          if (comp[j] > 0 && static_cast<int>(p % static_cast<std::uint32_t>(modulus_)) != residues_[j]) return false;
        }
        return true;
      case ModelKind::coprime:
        for (std::size_t i = 0; i < comp.size(); ++i) {
          if (comp[i] == 0) continue;
          for (std::size_t j = i + 1; j < comp.size(); ++j) {
            if (comp[j] > 0 && must_coprime_[i][j]) return false;
          }
        }
        return true;
      default:
        return true;
    }
  }

  ModelKind kind_;
  int k_;
  std::string id_;
  Rational theta_;
  std::vector<Rational> alpha_;
  std::vector<Rational> lambda_;
  int modulus_ = 0;
  std::vector<int> residues_;
  std::vector<std::vector<bool>> must_coprime_;
  BoundMetadata meta_;
};

/// Sum of the local G values over all compositions of v into k parts.
inline double local_g_sum(const WeightModel& model, std::uint32_t p, int v) {
  detail::require(v >= 0 && v <= 64, "local_g_sum needs 0 <= v <= 64");
  double sum = 0.0;
  for_each_composition(v, model.k(), [&](const std::vector<int>& c) { sum += model.g_local(p, c); });
  return sum;
}

inline Rational local_g_sum_exact(const WeightModel& model, std::uint32_t p, int v) {
  detail::require(v >= 0 && v <= 64, "local_g_sum needs 0 <= v <= 64");
  Rational sum = 0;
  for_each_composition(v, model.k(), [&](const std::vector<int>& c) { sum += model.g_local_exact(p, c); });
  return sum;
}

/// sum_{n = e_1 ... e_k} G(e_1, ..., e_k); zero marks an excluded n.
inline double total_g(const WeightModel& model, const FactoredInteger& fn) {
  double out = 1.0;
  for (const auto& pp : fn.factors) out *= local_g_sum(model, pp.p, pp.v);
  return out;
}

inline Rational total_g_exact(const WeightModel& model, const FactoredInteger& fn) {
  Rational out = 1;
  for (const auto& pp : fn.factors) out *= local_g_sum_exact(model, pp.p, pp.v);
  return out;
}

inline double f_value(const WeightModel& model, const FactoredInteger& fn) {
  double out = 1.0;
  for (const auto& pp : fn.factors) out *= model.f_local(pp.p, pp.v);
  return out;
}

inline Rational f_value_exact(const WeightModel& model, const FactoredInteger& fn) {
  Rational out = 1;
  for (const auto& pp : fn.factors) out *= model.f_local_exact(pp.p, pp.v);
  return out;
}

/// F(1, ..., p^v, ..., 1) = f(p^v) G(p^v e_j) / sum G at p^v.
inline double single_coordinate_weight(const WeightModel& model, std::uint32_t p, int v, int j) {
  std::vector<int> comp(static_cast<std::size_t>(model.k()), 0);
  comp[static_cast<std::size_t>(j)] = v;
  const double total = local_g_sum(model, p, v);
  if (total == 0.0) return 0.0;
  return model.f_local(p, v) * model.g_local(p, comp) / total;
}

/// Draws (d_1, ..., d_k) with n = d_1 ... d_k and probability G / sum G,
/// one composition per prime power, independently across primes.
template <typename Engine>
std::vector<std::uint64_t> sample_factorization(const FactoredInteger& fn, const WeightModel& model, Engine& engine) {
  const int k = model.k();
  std::vector<std::uint64_t> d(static_cast<std::size_t>(k), 1);
  std::vector<std::vector<int>> comps;
  std::vector<double> cumulative;
  for (const auto& pp : fn.factors) {
    comps.clear();
    cumulative.clear();
    double acc = 0.0;
    for_each_composition(pp.v, k, [&](const std::vector<int>& c) {
      const double g = model.g_local(pp.p, c);
      if (g <= 0.0) return;
      acc += g;
      comps.push_back(c);
      cumulative.push_back(acc);
    });
    if (comps.empty()) throw domain_error("sample_factorization: sum of G vanishes for this n");
    const double r = std::uniform_real_distribution<double>(0.0, acc)(engine);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(comps.size()) - 1));
    for (int j = 0; j < k; ++j) {
      for (int e = 0; e < comps[idx][static_cast<std::size_t>(j)]; ++e) d[static_cast<std::size_t>(j)] *= pp.p;
    }
  }
  return d;
}

inline std::vector<std::uint64_t> sample_factorization(const FactoredInteger& fn, const WeightModel& model, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  return sample_factorization(fn, model, engine);
}

}  // namespace dirlaw::arith
