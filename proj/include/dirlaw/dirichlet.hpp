#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dirlaw/errors.hpp"
#include "dirlaw/quadrature.hpp"
#include "dirlaw/special.hpp"

namespace dirlaw::dirichlet {

/// Parameter vector of Dir(alpha_1, ..., alpha_k).
class DirichletParams {
 public:
  DirichletParams() = default;
  explicit DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    detail::require(alpha_.size() >= 2, "Dirichlet dimension k must be at least 2");
    for (double a : alpha_) {
      detail::require(std::isfinite(a) && a > 0.0, "Dirichlet parameters must be positive");
    }
  }

  static DirichletParams symmetric(int k, double a) {
    detail::require(k >= 2, "Dirichlet dimension k must be at least 2");
    return DirichletParams(std::vector<double>(static_cast<std::size_t>(k), a));
  }

  int k() const { return static_cast<int>(alpha_.size()); }
  const std::vector<double>& alpha() const { return alpha_; }
  double operator[](std::size_t i) const { return alpha_[i]; }
  double total() const { return std::accumulate(alpha_.begin(), alpha_.end(), 0.0); }
  double min_alpha() const { return *std::min_element(alpha_.begin(), alpha_.end()); }

  /// Gamma(sum alpha) / prod Gamma(alpha_i)
  double normalizer() const {
    double c = gamma_fn(total());
    for (double a : alpha_) c /= gamma_fn(a);
    return c;
  }

 private:
  std::vector<double> alpha_;
};

struct SimplexPoint {
  std::vector<double> t;
};

inline void validate_point(const SimplexPoint& p, int k) {
  detail::require(static_cast<int>(p.t.size()) == k, "simplex point dimension mismatch");
  double sum = 0.0;
  for (double ti : p.t) {
    detail::require(ti >= 0.0 && ti <= 1.0, "simplex coordinates must lie in [0,1]");
    sum += ti;
  }
  detail::require(std::abs(sum - 1.0) <= 1e-12, "simplex coordinates must sum to 1");
}

/// Upper corner (u_1, ..., u_{k-1}) of the CDF rectangle.
struct RectQuery {
  std::vector<double> u;
};

inline void validate_rect(const RectQuery& r, int k) {
  detail::require(static_cast<int>(r.u.size()) == k - 1, "rect must have k-1 coordinates");
  double sum = 0.0;
  for (double ui : r.u) {
    detail::require(ui >= 0.0, "rect coordinates must be non-negative");
    sum += ui;
  }
  detail::require(sum <= 1.0 + 1e-12, "rect coordinates must satisfy sum(u) <= 1");
}

inline double density(const DirichletParams& params, const SimplexPoint& point) {
  validate_point(point, params.k());
  double log_part = 0.0;
  for (int i = 0; i < params.k(); ++i) {
    const double t = point.t[static_cast<std::size_t>(i)];
    const double a = params[static_cast<std::size_t>(i)];
    if (t == 0.0) {
      if (a < 1.0) throw singular_evaluation("density diverges on a boundary face with alpha_i < 1");
      if (a > 1.0) return 0.0;
      continue;
    }
    log_part += (a - 1.0) * std::log(t);
  }
  return params.normalizer() * std::exp(log_part);
}

/// (2/pi) arcsin(sqrt(u)), the Dir(1/2, 1/2) distribution function.
inline double cdf_arcsine(double u) {
  detail::require(u >= 0.0 && u <= 1.0, "cdf_arcsine: u must lie in [0,1]");
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(u));
}

namespace detail_cdf {

// Integrates over {t_i <= u_i, sum t <= 1} after substituting t_i = w_i^{1/alpha_i}
// in each of the first k-1 coordinates. The remaining factor is
// slack^{alpha_k - 1} with slack = 1 - sum t, tracked through endpoint
// distances so it stays accurate near the face sum t = 1.
class RegionIntegrator {
 public:
  RegionIntegrator(const DirichletParams& params, std::vector<double> upper, double tol)
      : params_(params), upper_(std::move(upper)), tol_(tol) {}

  double run() const { return level(0, 1.0, tol_); }

 private:
  double level(std::size_t i, double slack, double tol) const {
    const double a = params_[i];
    const double cap = std::min(upper_[i], slack);
    if (cap <= 0.0) return 0.0;
    const double excess = slack - cap;
    const double wmax = std::pow(cap, a);
    const bool last = i + 2 == static_cast<std::size_t>(params_.k());
    const double ak = params_.alpha().back();
    auto integrand = [&](double w, double /*dist_left*/, double dist_right) {
      double gap;  // cap - t, where t = w^{1/a}
      if (dist_right < 0.5 * wmax) {
        gap = -cap * std::expm1(std::log1p(-dist_right / wmax) / a);
      } else {
        gap = cap - std::pow(w, 1.0 / a);
      }
      const double next = excess + gap;
      if (!(next > 0.0)) return 0.0;
      const double inner = last ? std::pow(next, ak - 1.0) : level(i + 1, next, 0.1 * tol);
      return inner / a;
    };
    return quad::tanh_sinh(integrand, 0.0, wmax, tol).value;
  }

  const DirichletParams& params_;
  std::vector<double> upper_;
  double tol_;
};

inline void check_tol(double tol) {
  detail::require(tol >= 1e-12 && tol <= 1e-3, "cdf tolerance must lie in [1e-12, 1e-3]");
}

inline void check_dimension(const DirichletParams& params) {
  if (params.k() - 1 > 4) throw unsupported_error("quadrature CDF supports k-1 <= 4; use cdf_monte_carlo");
}

}  // namespace detail_cdf

/// F_alpha(u): probability that t_i <= u_i for i = 1..k-1.
inline double cdf(const DirichletParams& params, const RectQuery& rect, double tol = 1e-10) {
  detail_cdf::check_dimension(params);
  detail_cdf::check_tol(tol);
  validate_rect(rect, params.k());
  std::vector<double> upper = rect.u;
  for (double& v : upper) v = std::min(v, 1.0);
  const double value = params.normalizer() * detail_cdf::RegionIntegrator(params, upper, tol).run();
  return std::clamp(value, 0.0, 1.0);
}

/// Integral of the density over the whole simplex (should be 1).
inline double simplex_mass(const DirichletParams& params, double tol = 1e-10) {
  detail_cdf::check_dimension(params);
  detail_cdf::check_tol(tol);
  std::vector<double> upper(static_cast<std::size_t>(params.k() - 1), 1.0);
  return params.normalizer() * detail_cdf::RegionIntegrator(params, upper, tol).run();
}

/// Deterministic Dirichlet sampler: k Gamma(alpha_i, 1) draws normalized by
/// their sum. Shapes below 1 use the boost U^{1/alpha} on a Gamma(alpha+1)
/// draw, carried in log space so tiny shapes do not underflow.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // (0, 1), 53 random bits
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  /// log of a Gamma(shape, 1) variate.
  double log_gamma_variate(double shape) {
    if (shape < 1.0) {
      return log_gamma_variate(shape + 1.0) + std::log(uniform()) / shape;
    }
    // Marsaglia-Tsang
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return std::log(d * v);
    }
  }

  SimplexPoint draw(const DirichletParams& params) {
    const auto k = static_cast<std::size_t>(params.k());
    std::vector<double> logs(k);
    for (std::size_t i = 0; i < k; ++i) logs[i] = log_gamma_variate(params[i]);
    const double top = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double& v : logs) {
      v = std::exp(v - top);
      sum += v;
    }
    for (double& v : logs) v /= sum;
    return SimplexPoint{std::move(logs)};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline SimplexPoint sample(const DirichletParams& params, std::uint64_t seed) {
  Sampler s(seed);
  return s.draw(params);
}

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

inline McEstimate cdf_monte_carlo(const DirichletParams& params, const RectQuery& rect,
                                  std::int64_t n_samples, std::uint64_t seed) {
  detail::require(n_samples >= 1000, "cdf_monte_carlo needs at least 1000 samples");
  validate_rect(rect, params.k());
  Sampler sampler(seed);
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    const auto p = sampler.draw(params);
    bool inside = true;
    for (std::size_t i = 0; i < rect.u.size() && inside; ++i) inside = p.t[i] <= rect.u[i];
    hits += inside ? 1 : 0;
  }
  const double n = static_cast<double>(n_samples);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace dirlaw::dirichlet
