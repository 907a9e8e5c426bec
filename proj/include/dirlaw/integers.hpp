#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "dirlaw/arith.hpp"
#include "dirlaw/dirichlet.hpp"
#include "dirlaw/errors.hpp"
#include "dirlaw/models.hpp"
#include "dirlaw/quadrature.hpp"
#include "dirlaw/rational.hpp"
#include "dirlaw/report.hpp"
#include "dirlaw/special.hpp"

namespace dirlaw::integers {

using arith::CompositionTable;
using arith::FactoredInteger;
using arith::SpfSieve;
using arith::WeightModel;

/// Relative slack on log d <= u log n so exact ties d = n^u always count.
inline constexpr double kTieGuard = 1e-12;

/// Exact path cut-over for sup_deviation.
inline constexpr std::uint64_t kExactGridLimit = 100'000;

using Fixed = unsigned __int128;

/// Weights are accumulated as 64.64 fixed point so that shard merges are
/// exact integer additions, independent of the shard count.
inline Fixed to_fixed(double w) { return static_cast<Fixed>(w * 0x1.0p64); }

inline long double fixed_ratio(Fixed num, Fixed den) {
  if (den == 0) return 0.0L;
  return static_cast<long double>(num) / static_cast<long double>(den);
}

namespace detail {

inline int max_exponent(std::uint64_t x) {
  int v = 0;
  while (x > 1) {
    x >>= 1;
    ++v;
  }
  return std::max(v, 1);
}

struct LocalOption {
  const std::vector<int>* comp;
  double g;
};

/// Calls visit(logd, weight, total) for every tuple with positive weight,
/// where logd[j] = log d_j, weight = G(d_1, ..., d_k) and total = sum of G
/// over all factorizations of n. Returns the total (0: nothing visited).
template <typename Visit>
double for_each_tuple(const FactoredInteger& fn, const WeightModel& model, const CompositionTable& table, Visit&& visit) {
  const auto k = static_cast<std::size_t>(model.k());
  const std::size_t nf = fn.factors.size();
  std::vector<std::vector<LocalOption>> options(nf);
  double total = 1.0;
  for (std::size_t i = 0; i < nf; ++i) {
    double sum = 0.0;
    for (const auto& c : table.of(fn.factors[i].v)) {
      const double g = model.g_local(fn.factors[i].p, c);
      if (g > 0.0) {
        options[i].push_back({&c, g});
        sum += g;
      }
    }
    total *= sum;
  }
  if (total <= 0.0) return 0.0;
  std::vector<double> logd((nf + 1) * k, 0.0);
  std::vector<double> logp(nf);
  for (std::size_t i = 0; i < nf; ++i) logp[i] = std::log(static_cast<double>(fn.factors[i].p));
  auto rec = [&](auto&& self, std::size_t i, double weight) -> void {
    if (i == nf) {
      visit(static_cast<const double*>(&logd[nf * k]), weight, total);
      return;
    }
    const double* prev = &logd[i * k];
    double* next = &logd[(i + 1) * k];
    for (const auto& opt : options[i]) {
      for (std::size_t j = 0; j < k; ++j) next[j] = prev[j] + (*opt.comp)[j] * logp[i];
      self(self, i + 1, weight * opt.g);
    }
  };
  rec(rec, 0, 1.0);
  return total;
}

}  // namespace detail

/// Fixed-point cell totals over a per-axis threshold lattice. A tuple with
/// ratios r_i = log d_i / log n lands in the cell whose index on axis i is
/// the first threshold >= r_i; cumulative sums then give the weighted count
/// of tuples with r_i <= threshold_i on every axis.
class CellTotals {
 public:
  CellTotals() = default;
  explicit CellTotals(std::vector<std::vector<double>> thresholds) : thresholds_(std::move(thresholds)) {
    std::size_t size = 1;
    strides_.resize(thresholds_.size());
    for (std::size_t a = thresholds_.size(); a-- > 0;) {
      strides_[a] = size;
      size *= thresholds_[a].size();
    }
    cells_.assign(size, 0);
  }

  void deposit(const double* logd, double logn, Fixed w) {
    total_ += w;
    std::size_t idx = 0;
    for (std::size_t a = 0; a < thresholds_.size(); ++a) {
      const double r = logn > 0.0 ? logd[a] / logn : 0.0;
      const auto& th = thresholds_[a];
      const auto pos = static_cast<std::size_t>(std::lower_bound(th.begin(), th.end(), r - kTieGuard) - th.begin());
      if (pos == th.size()) return;
      idx += pos * strides_[a];
    }
    cells_[idx] += w;
  }

  void add_normalizer(Fixed f) { normalizer_ += f; }

  void merge(const CellTotals& other) {
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
    total_ += other.total_;
    normalizer_ += other.normalizer_;
  }

  /// In-place prefix sums along every axis.
  std::vector<Fixed> cumulative() const {
    std::vector<Fixed> cum = cells_;
    for (std::size_t a = 0; a < thresholds_.size(); ++a) {
      const std::size_t len = thresholds_[a].size();
      const std::size_t stride = strides_[a];
      for (std::size_t i = 0; i < cum.size(); ++i) {
        if ((i / stride) % len != 0) cum[i] += cum[i - stride];
      }
    }
    return cum;
  }

  const std::vector<std::vector<double>>& thresholds() const { return thresholds_; }
  const std::vector<std::size_t>& strides() const { return strides_; }
  const std::vector<Fixed>& cells() const { return cells_; }
  Fixed total() const { return total_; }
  Fixed normalizer() const { return normalizer_; }

 private:
  std::vector<std::vector<double>> thresholds_;
  std::vector<std::size_t> strides_;
  std::vector<Fixed> cells_;
  Fixed total_ = 0;
  Fixed normalizer_ = 0;
};

/// Runs every n <= x through the tuple enumerator, sharded by contiguous
/// n-ranges; shard results are merged with exact integer addition.
inline CellTotals accumulate_cells(std::uint64_t x, const WeightModel& model, const std::vector<std::vector<double>>& thresholds,
                                   int shards, const SpfSieve& sieve) {
  dirlaw::detail::require(x >= 1, "x must be at least 1");
  dirlaw::detail::require(shards >= 1, "shards must be at least 1");
  if (x > sieve.limit()) throw domain_error("sieve does not cover x");
  const CompositionTable table(model.k(), detail::max_exponent(x));
  const auto nshards = static_cast<std::uint64_t>(shards);
  std::vector<CellTotals> parts(nshards, CellTotals(thresholds));
  std::vector<std::exception_ptr> errors(nshards);
  auto work = [&](std::uint64_t s) {
    try {
      const std::uint64_t lo = 1 + s * x / nshards;
      const std::uint64_t hi = (s + 1) * x / nshards;
      auto& cells = parts[s];
      for (std::uint64_t n = lo; n <= hi; ++n) {
        const auto fn = arith::factorize(n, sieve);
        const double f = arith::f_value(model, fn);
        if (f <= 0.0) continue;
        const double logn = std::log(static_cast<double>(n));
        cells.add_normalizer(to_fixed(f));
        const double total = detail::for_each_tuple(fn, model, table, [&](const double* logd, double g, double sum) {
          cells.deposit(logd, logn, to_fixed(f * g / sum));
        });
        if (total <= 0.0) throw integrity_error("sum of G vanishes at n = " + std::to_string(n) + " although f(n) > 0");
      }
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  if (nshards == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::uint64_t s = 0; s < nshards; ++s) threads.emplace_back(work, s);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  CellTotals out(thresholds);
  for (const auto& p : parts) out.merge(p);
  return out;
}

/// Left-hand side of the weighted factorization law at one rect, in double
/// precision: sum_n f(n) (sum G)^{-1} sum_{counted tuples} G / sum_n f(n).
inline double exact_lhs(std::uint64_t x, const WeightModel& model, const dirichlet::RectQuery& rect, const SpfSieve& sieve,
                        int shards = 1) {
  dirlaw::detail::require(static_cast<int>(rect.u.size()) == model.k() - 1, "rect must have k-1 coordinates");
  dirichlet::validate_rect(rect, model.k());
  std::vector<std::vector<double>> th;
  for (double u : rect.u) th.push_back({u});
  const auto cells = accumulate_cells(x, model, th, shards, sieve);
  return static_cast<double>(fixed_ratio(cells.cells()[0], cells.normalizer()));
}

/// d <= n^u decided exactly for rational u = a/b via d^b <= n^a.
inline bool power_le(std::uint64_t d, std::uint64_t n, const Rational& u) {
  if (d <= 1) return true;
  if (n <= 1) return false;
  const double ld = std::log(static_cast<double>(d));
  const double rhs = u.get_d() * std::log(static_cast<double>(n));
  const double margin = 1e-9 * std::max(1.0, rhs);
  if (ld < rhs - margin) return true;
  if (ld > rhs + margin) return false;
  const BigInt lhs = ipow(BigInt(static_cast<unsigned long>(d)), u.get_den().get_ui());
  const BigInt right = ipow(BigInt(static_cast<unsigned long>(n)), u.get_num().get_ui());
  return lhs <= right;
}

/// Exact rational left-hand side (rational weights, exact power comparisons).
inline Rational exact_lhs_rational(std::uint64_t x, const WeightModel& model, const std::vector<Rational>& u,
                                   const SpfSieve& sieve) {
  dirlaw::detail::require(static_cast<int>(u.size()) == model.k() - 1, "rect must have k-1 coordinates");
  dirlaw::detail::require(x >= 1 && x <= 10'000'000, "exact rational mode supports 1 <= x <= 10^7");
  Rational usum = 0;
  for (const auto& ui : u) {
    dirlaw::detail::require(ui >= 0, "rect coordinates must be non-negative");
    usum += ui;
  }
  dirlaw::detail::require(usum <= 1, "rect coordinates must sum to at most 1");
  const auto k = static_cast<std::size_t>(model.k());
  const CompositionTable table(model.k(), detail::max_exponent(x));
  Rational numerator = 0;
  Rational normalizer = 0;
  std::vector<std::uint64_t> d;
  for (std::uint64_t n = 1; n <= x; ++n) {
    const auto fn = arith::factorize(n, sieve);
    const Rational f = arith::f_value_exact(model, fn);
    if (f == 0) continue;
    normalizer += f;
    Rational counted = 0;
    Rational total = 0;
    const std::size_t nf = fn.factors.size();
    std::vector<std::vector<std::pair<const std::vector<int>*, Rational>>> options(nf);
    for (std::size_t i = 0; i < nf; ++i) {
      for (const auto& c : table.of(fn.factors[i].v)) {
        Rational g = model.g_local_exact(fn.factors[i].p, c);
        if (g > 0) options[i].emplace_back(&c, std::move(g));
      }
    }
    d.assign(k, 1);
    auto rec = [&](auto&& self, std::size_t i, const Rational& weight) -> void {
      if (i == nf) {
        total += weight;
        for (std::size_t j = 0; j + 1 < k; ++j) {
          if (!power_le(d[j], n, u[j])) return;
        }
        counted += weight;
        return;
      }
      const std::uint64_t p = fn.factors[i].p;
      const std::vector<std::uint64_t> saved = d;
      for (const auto& [comp, g] : options[i]) {
        for (std::size_t j = 0; j < k; ++j) {
          for (int e = 0; e < (*comp)[j]; ++e) d[j] *= p;
        }
        self(self, i + 1, weight * g);
        d = saved;
      }
    };
    rec(rec, 0, Rational(1));
    if (total == 0) throw integrity_error("sum of G vanishes at n = " + std::to_string(n) + " although f(n) > 0");
    numerator += f * counted / total;
  }
  return numerator / normalizer;
}

/// Binned empirical law of (log d_1 / log n, ..., log d_{k-1} / log n).
/// Bin b on an axis covers (b/B, (b+1)/B], with bin 0 also holding 0.
struct HistogramGrid {
  int k = 2;
  int bins_per_dim = 0;
  std::vector<double> weights;     // normalized cell masses
  std::vector<double> cumulative;  // normalized prefix sums
  double total_weight = 0.0;       // sum of f(n) G / sum G
  double normalizer = 0.0;         // sum of f(n)

  std::size_t index(const std::vector<std::size_t>& bin) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < bin.size(); ++a) idx = idx * static_cast<std::size_t>(bins_per_dim) + bin[a];
    return idx;
  }
};

inline HistogramGrid accumulate_histogram(std::uint64_t x, const WeightModel& model, int bins, int shards, const SpfSieve& sieve) {
  dirlaw::detail::require(bins >= 10 && bins <= 2000, "bins must lie in [10, 2000]");
  const int dims = model.k() - 1;
  double cells = 1.0;
  for (int a = 0; a < dims; ++a) cells *= bins;
  if (cells > 1e8) throw resource_error("histogram would exceed 10^8 cells");
  std::vector<double> edges;
  for (int b = 1; b <= bins; ++b) edges.push_back(static_cast<double>(b) / bins);
  edges.back() = 1.0;
  const auto totals = accumulate_cells(x, model, std::vector<std::vector<double>>(static_cast<std::size_t>(dims), edges), shards, sieve);
  HistogramGrid grid;
  grid.k = model.k();
  grid.bins_per_dim = bins;
  grid.weights.reserve(totals.cells().size());
  for (Fixed c : totals.cells()) grid.weights.push_back(static_cast<double>(fixed_ratio(c, totals.normalizer())));
  for (Fixed c : totals.cumulative()) grid.cumulative.push_back(static_cast<double>(fixed_ratio(c, totals.normalizer())));
  grid.total_weight = static_cast<double>(static_cast<long double>(totals.total()) * 0x1.0p-64L);
  grid.normalizer = static_cast<double>(static_cast<long double>(totals.normalizer()) * 0x1.0p-64L);
  return grid;
}

/// Mass of all bins whose lower edge lies below u (plus the origin bin).
/// Exact when every u_i is a bin edge; otherwise the bin containing u_i is
/// included in full. Coordinates above 1 are clamped.
inline double empirical_cdf(const HistogramGrid& grid, const std::vector<double>& u) {
  dirlaw::detail::require(static_cast<int>(u.size()) == grid.k - 1, "rect must have k-1 coordinates");
  std::vector<std::size_t> bin;
  for (double ui : u) {
    dirlaw::detail::require(ui >= 0.0, "rect coordinates must be non-negative");
    const double scaled = std::min(ui, 1.0) * grid.bins_per_dim;
    const auto last = static_cast<long>(std::ceil(scaled - 1e-9)) - 1;
    bin.push_back(static_cast<std::size_t>(std::clamp<long>(last, 0, grid.bins_per_dim - 1)));
  }
  return grid.cumulative[grid.index(bin)];
}

/// Left-hand side at every point of a rect grid in one pass.
inline std::vector<double> lhs_on_grid(std::uint64_t x, const WeightModel& model, const RectGrid& grid, int shards,
                                       const SpfSieve& sieve) {
  std::vector<double> axis;
  for (std::int64_t j = 1; j <= grid.denominator - 1; ++j) axis.push_back(static_cast<double>(j) / static_cast<double>(grid.denominator));
  const auto totals = accumulate_cells(x, model, std::vector<std::vector<double>>(static_cast<std::size_t>(model.k() - 1), axis), shards, sieve);
  const auto cum = totals.cumulative();
  std::vector<double> out;
  for (const auto& pt : grid.points) {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < pt.size(); ++a) idx += static_cast<std::size_t>(pt[a] - 1) * totals.strides()[a];
    out.push_back(static_cast<double>(fixed_ratio(cum[idx], totals.normalizer())));
  }
  return out;
}

struct StudyOptions {
  int shards = 1;
  int bins = 1000;  // histogram path only
  double tol = 1e-10;
};

/// Sup over the rect grid of |LHS - F_alpha| for the model's predicted law.
/// x <= 10^5 uses the exact per-point sums, larger x the binned histogram.
inline DeviationReport sup_deviation(std::uint64_t x, const WeightModel& model, double grid_step, const SpfSieve& sieve,
                                     const StudyOptions& opt = {}) {
  const auto grid = make_rect_grid(model.k(), grid_step);
  const auto params = model.predicted();
  DeviationReport report;
  report.kind = "integers";
  report.scale = static_cast<double>(x);
  report.k = model.k();
  report.model = model.id();
  report.grid_step = grid_step;
  std::vector<double> lhs;
  if (x <= kExactGridLimit) {
    lhs = lhs_on_grid(x, model, grid, opt.shards, sieve);
  } else {
    report.bins = opt.bins;
    const auto hist = accumulate_histogram(x, model, opt.bins, opt.shards, sieve);
    for (std::size_t i = 0; i < grid.points.size(); ++i) lhs.push_back(empirical_cdf(hist, grid.as_double(i)));
  }
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    auto u = grid.as_double(i);
    const double limit = dirichlet::cdf(params, {u}, opt.tol);
    report.add(std::move(u), lhs[i], limit);
  }
  report.scaled_sup_dev = x > 1 ? report.sup_dev * std::pow(std::log(static_cast<double>(x)), model.min_exponent()) : 0.0;
  return report;
}

inline std::vector<DeviationReport> convergence_study(const std::vector<std::uint64_t>& xs, const WeightModel& model,
                                                      double grid_step, const SpfSieve& sieve, const StudyOptions& opt = {}) {
  dirlaw::detail::require(std::is_sorted(xs.begin(), xs.end()), "convergence scales must be ascending");
  std::vector<DeviationReport> out;
  for (auto x : xs) out.push_back(sup_deviation(x, model, grid_step, sieve, opt));
  return out;
}

// ---------------------------------------------------------------------------
// Weighted sum S(x_1, ..., x_k) = sum_{d_j <= x_j} prod (log d_j)^2 / tau_k(d_1 ... d_k)

struct WeightedSum {
  double s = 0.0;
  double main = 0.0;
  double residual_ratio = 0.0;
};

/// (1 / Gamma(1/k)^k) prod_j int_1^{x_j} (log y)^{1/k + 1} dy, each factor
/// computed as int_0^{log x_j} t^{1/k+1} e^t dt.
inline double weighted_sum_main_term(const std::vector<double>& xs) {
  const double k = static_cast<double>(xs.size());
  const double a = 1.0 / k + 1.0;
  double out = 1.0;
  for (double x : xs) {
    const double top = std::log(x);
    const double scale = x * std::pow(top, a);
    auto f = [&](double t, double, double) { return std::pow(t, a) * std::exp(t); };
    out *= quad::tanh_sinh(f, 0.0, top, 1e-13 * scale, 12).value;
  }
  return out / std::pow(gamma_fn(1.0 / k), k);
}

inline WeightedSum weighted_sum_S(const std::vector<double>& xs, const SpfSieve& sieve) {
  const std::size_t k = xs.size();
  dirlaw::detail::require(k >= 1, "weighted_sum_S needs at least one coordinate");
  std::vector<std::uint64_t> bound;
  double cost = 1.0;
  for (double x : xs) {
    dirlaw::detail::require(x >= std::numbers::e, "weighted_sum_S needs every x_j >= e");
    bound.push_back(static_cast<std::uint64_t>(std::floor(x)));
    cost *= std::floor(x);
  }
  if (cost > 1e8) throw resource_error("weighted_sum_S enumeration exceeds 10^8 tuples");
  const std::uint64_t top = *std::max_element(bound.begin(), bound.end());
  if (top > sieve.limit()) throw domain_error("sieve does not cover max x_j");

  std::vector<std::vector<arith::PrimePower>> fac(top + 1);
  std::vector<double> sq_log(top + 1, 0.0);
  for (std::uint64_t d = 1; d <= top; ++d) {
    fac[d] = arith::factorize(d, sieve).factors;
    const double l = std::log(static_cast<double>(d));
    sq_log[d] = l * l;
  }
  // tau_k(p^V) = C(V + k - 1, k - 1) for V up to the largest total exponent
  int vmax = 0;
  for (auto b : bound) vmax += detail::max_exponent(b);
  std::vector<double> local_tau(static_cast<std::size_t>(vmax) + 1);
  for (int v = 0; v <= vmax; ++v) {
    local_tau[static_cast<std::size_t>(v)] = binomial(static_cast<unsigned long>(v) + k - 1, k - 1).get_d();
  }

  WeightedSum out;
  std::vector<std::vector<arith::PrimePower>> merged(k + 1);
  auto rec = [&](auto&& self, std::size_t j, double prod) -> void {
    if (j == k) {
      double tau = 1.0;
      for (const auto& pp : merged[k]) tau *= local_tau[static_cast<std::size_t>(pp.v)];
      out.s += prod / tau;
      return;
    }
    // d_j = 1 contributes log 1 = 0 to every term below it
    for (std::uint64_t d = 2; d <= bound[j]; ++d) {
      auto& dst = merged[j + 1];
      const auto& src = merged[j];
      const auto& add = fac[d];
      dst.clear();
      std::size_t a = 0, b = 0;
      while (a < src.size() || b < add.size()) {
        if (b == add.size() || (a < src.size() && src[a].p < add[b].p)) {
          dst.push_back(src[a++]);
        } else if (a == src.size() || add[b].p < src[a].p) {
          dst.push_back(add[b++]);
        } else {
          dst.push_back({src[a].p, src[a].v + add[b].v});
          ++a;
          ++b;
        }
      }
      self(self, j + 1, prod * sq_log[d]);
    }
  };
  rec(rec, 0, 1.0);
  out.main = weighted_sum_main_term(xs);
  out.residual_ratio = (out.s - out.main) / out.main;
  return out;
}

// ---------------------------------------------------------------------------

/// Monte Carlo estimate of the left-hand side: n uniform on [1, x] accepted
/// with probability f(n), then a tuple drawn with probability G / sum G.
inline dirichlet::McEstimate mc_lhs(std::uint64_t x, const WeightModel& model, const dirichlet::RectQuery& rect,
                                    std::int64_t n_samples, std::uint64_t seed, const SpfSieve& sieve) {
  dirlaw::detail::require(n_samples >= 1000, "mc_lhs needs at least 1000 samples");
  dirlaw::detail::require(static_cast<int>(rect.u.size()) == model.k() - 1, "rect must have k-1 coordinates");
  if (!model.f_bounded_by_one()) throw unsupported_error("mc_lhs needs f bounded by 1; use the exact path");
  if (x > sieve.limit()) throw domain_error("sieve does not cover x");
  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<std::uint64_t> pick(1, x);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::int64_t hits = 0;
  std::int64_t attempts = 0;
  for (std::int64_t s = 0; s < n_samples;) {
    if (++attempts > 1000 * n_samples) throw domain_error("mc_lhs: f vanishes on almost all of [1, x]");
    const std::uint64_t n = pick(engine);
    const auto fn = arith::factorize(n, sieve);
    const double f = arith::f_value(model, fn);
    if (f <= 0.0 || (f < 1.0 && coin(engine) >= f)) continue;
    ++s;
    const auto d = arith::sample_factorization(fn, model, engine);
    const double logn = std::log(static_cast<double>(n));
    bool inside = true;
    for (std::size_t j = 0; j < rect.u.size() && inside; ++j) {
      inside = std::log(static_cast<double>(d[j])) <= rect.u[j] * logn + kTieGuard * logn;
    }
    hits += inside ? 1 : 0;
  }
  const double n = static_cast<double>(n_samples);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace dirlaw::integers
