#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dirlaw/arith.hpp"
#include "dirlaw/dirichlet.hpp"
#include "dirlaw/errors.hpp"
#include "dirlaw/integers.hpp"
#include "dirlaw/models.hpp"
#include "dirlaw/perms.hpp"
#include "dirlaw/polyfield.hpp"
#include "dirlaw/rational.hpp"
#include "dirlaw/report.hpp"
#include "dirlaw/series.hpp"

#ifndef DIRLAW_VERSION
#define DIRLAW_VERSION "0.0.0"
#endif

namespace dirlaw::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResource = 3;
inline constexpr int kExitIntegrity = 4;

inline std::string tool_version() { return DIRLAW_VERSION; }

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Argument parsing helpers

inline std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& r : parse_rational_list(text)) out.push_back(r.get_d());
  detail::require(!out.empty(), flag + " needs at least one value");
  return out;
}

/// Integer scale; accepts exponent notation such as 1e6.
inline std::uint64_t parse_scale(const std::string& text, const std::string& flag) {
  const Rational r = parse_rational(text);
  detail::require(r.get_den() == 1 && r >= 0 && r <= Rational(BigInt("9007199254740992")), flag + " must be a non-negative integer");
  return static_cast<std::uint64_t>(r.get_d());
}

inline std::vector<std::uint64_t> parse_scales(const std::string& text, const std::string& flag) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_scale(item, flag));
  detail::require(!out.empty(), flag + " needs at least one value");
  return out;
}

/// "2", "1.5+3i", "2-0.5i"
inline std::complex<double> parse_complex(const std::string& text) {
  std::string s = text;
  if (!s.empty() && s.back() == 'i') {
    s.pop_back();
    std::size_t cut = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
        cut = i;
        break;
      }
    }
    if (cut == std::string::npos) return {0.0, s.empty() ? 1.0 : parse_rational(s).get_d()};
    const std::string im = s.substr(cut);
    const double imag = (im == "+" || im == "-") ? (im == "+" ? 1.0 : -1.0) : parse_rational(im).get_d();
    return {parse_rational(s.substr(0, cut)).get_d(), imag};
  }
  return {parse_rational(s).get_d(), 0.0};
}

// ---------------------------------------------------------------------------
// Output

struct Options {
  std::string kind, verb;
  int k = 0;
  std::string alpha, u, t, s, x, n, q, model = "uniform";
  double grid = 0.05;
  int bins = 1000;
  int threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
  double tol = 1e-10;
  std::int64_t samples = 0;
  std::uint64_t p = 0;
  int v = 0;
  int j = 1;
};

struct Output {
  std::string text;
  std::string summary;
};

inline json report_json(const DeviationReport& r, const Options& opt) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"u", row.u}, {"empirical", row.empirical}, {"limit", row.limit}, {"deviation", row.deviation}});
  }
  return {{"kind", r.kind},         {"k", r.k},
          {"scale", r.scale},       {"model", r.model},
          {"grid_step", r.grid_step}, {"bins", r.bins},
          {"seed", opt.seed},       {"sup_dev", r.sup_dev},
          {"scaled_sup_dev", r.scaled_sup_dev}, {"rows", rows},
          {"timestamp_utc", utc_timestamp()}, {"tool_version", tool_version()}};
}

inline std::string deviation_csv(const DeviationReport& r) {
  std::ostringstream os;
  for (int i = 1; i < r.k; ++i) os << "u_" << i << ',';
  os << "empirical,limit,deviation\n";
  for (const auto& row : r.rows) {
    for (double ui : row.u) os << format_real(ui) << ',';
    os << format_real(row.empirical) << ',' << format_real(row.limit) << ',' << format_real(row.deviation) << '\n';
  }
  return os.str();
}

inline Output deviation_output(const DeviationReport& r, const Options& opt) {
  Output o;
  o.text = opt.format == "json" ? report_json(r, opt).dump(2) + "\n" : deviation_csv(r);
  o.summary = r.kind + " scale=" + format_real(r.scale) + " sup_dev=" + format_real(r.sup_dev) +
              " scaled_sup_dev=" + format_real(r.scaled_sup_dev);
  return o;
}

inline Output convergence_output(const std::vector<DeviationReport>& reports, const Options& opt) {
  Output o;
  if (opt.format == "json") {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_json(r, opt));
    o.text = arr.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "scale,sup_dev,scaled_sup_dev\n";
    for (const auto& r : reports) os << format_real(r.scale) << ',' << format_real(r.sup_dev) << ',' << format_real(r.scaled_sup_dev) << '\n';
    o.text = os.str();
  }
  o.summary = opt.kind + " converge: " + std::to_string(reports.size()) + " scales";
  return o;
}

/// Single-row result: bare value for one unnamed column, CSV header + row otherwise.
inline Output table_output(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows,
                           const Options& opt) {
  Output o;
  if (opt.format == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj = json::object();
      for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
      arr.push_back(obj);
    }
    json doc = {{"kind", opt.kind}, {"verb", opt.verb}, {"seed", opt.seed}, {"rows", arr},
                {"timestamp_utc", utc_timestamp()}, {"tool_version", tool_version()}};
    o.text = doc.dump(2) + "\n";
  } else if (columns.size() == 1 && columns[0] == "value") {
    for (const auto& row : rows) o.text += row[0] + "\n";
  } else {
    std::ostringstream os;
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << '\n';
    }
    o.text = os.str();
  }
  o.summary = opt.kind + " " + opt.verb + ": " + std::to_string(rows.size()) + " row(s)";
  return o;
}

inline Output value_output(const std::string& value, const Options& opt) {
  auto o = table_output({"value"}, {{value}}, opt);
  o.summary = value;
  return o;
}

inline std::filesystem::path manifest_path(const std::filesystem::path& out) {
  return out.string() + ".manifest.json";
}

inline json build_manifest(const Options& opt, const std::vector<std::string>& args) {
  json params = {{"k", opt.k},         {"alpha", opt.alpha}, {"u", opt.u},       {"t", opt.t},
                 {"s", opt.s},         {"x", opt.x},         {"n", opt.n},       {"q", opt.q},
                 {"model", opt.model}, {"grid", opt.grid},   {"bins", opt.bins}, {"threads", opt.threads},
                 {"format", opt.format}, {"tol", opt.tol},   {"samples", opt.samples},
                 {"p", opt.p},         {"v", opt.v},         {"j", opt.j}};
  return {{"kind", opt.kind},         {"verb", opt.verb},
          {"args", args},             {"parameters", params},
          {"seed", opt.seed},         {"tool_version", tool_version()},
          {"timestamp_utc", utc_timestamp()}, {"outputs", json::array({opt.out})}};
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw resource_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw resource_error("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Verbs

inline arith::WeightModel model_from(const Options& opt) {
  auto model = arith::WeightModel::parse(opt.model, opt.k == 0 ? 2 : opt.k);
  if (opt.k != 0 && model.k() != opt.k) {
    throw domain_error("model " + opt.model + " has dimension " + std::to_string(model.k()) + ", not --k " + std::to_string(opt.k));
  }
  return model;
}

inline void need(bool present, const std::string& flag, const Options& opt) {
  detail::require(present, opt.kind + " " + opt.verb + " requires " + flag);
}

inline integers::StudyOptions study_options(const Options& opt) { return {opt.threads, opt.bins, opt.tol}; }

inline Output run_dirichlet(const Options& opt) {
  need(!opt.alpha.empty(), "--alpha", opt);
  const dirichlet::DirichletParams params(parse_reals(opt.alpha, "--alpha"));
  detail::require(opt.k == 0 || opt.k == params.k(), "--k disagrees with the length of --alpha");
  if (opt.verb == "cdf") {
    need(!opt.u.empty(), "--u", opt);
    return value_output(format_real(dirichlet::cdf(params, {parse_reals(opt.u, "--u")}, opt.tol)), opt);
  }
  if (opt.verb == "density") {
    need(!opt.t.empty(), "--t", opt);
    return value_output(format_real(dirichlet::density(params, {parse_reals(opt.t, "--t")})), opt);
  }
  // sample
  const std::int64_t count = opt.samples == 0 ? 1 : opt.samples;
  detail::require(count >= 1, "--samples must be positive");
  dirichlet::Sampler sampler(opt.seed);
  std::vector<std::string> cols;
  for (int i = 1; i <= params.k(); ++i) cols.push_back("t_" + std::to_string(i));
  std::vector<std::vector<std::string>> rows;
  for (std::int64_t s = 0; s < count; ++s) {
    std::vector<std::string> row;
    for (double v : sampler.draw(params).t) row.push_back(format_real(v));
    rows.push_back(std::move(row));
  }
  return table_output(cols, rows, opt);
}

inline Output run_integers(const Options& opt) {
  if (opt.verb == "lemma43") {
    need(!opt.x.empty(), "--x", opt);
    const auto xs = parse_reals(opt.x, "--x");
    double top = 1.0;
    for (double x : xs) top = std::max(top, x);
    const auto sieve = arith::cached_sieve(static_cast<std::uint64_t>(std::floor(top)));
    const auto r = integers::weighted_sum_S(xs, sieve);
    return table_output({"S", "main", "residual_ratio"}, {{format_real(r.s), format_real(r.main), format_real(r.residual_ratio)}}, opt);
  }
  need(!opt.x.empty(), "--x", opt);
  const auto model = model_from(opt);
  if (opt.verb == "converge") {
    const auto xs = parse_scales(opt.x, "--x");
    const auto sieve = arith::cached_sieve(*std::max_element(xs.begin(), xs.end()));
    return convergence_output(integers::convergence_study(xs, model, opt.grid, sieve, study_options(opt)), opt);
  }
  const std::uint64_t x = parse_scale(opt.x, "--x");
  detail::require(x >= 1, "--x must be at least 1");
  const auto sieve = arith::cached_sieve(x);
  if (opt.verb == "run") return deviation_output(integers::sup_deviation(x, model, opt.grid, sieve, study_options(opt)), opt);
  need(!opt.u.empty(), "--u", opt);
  const auto u = parse_rational_list(opt.u);
  if (opt.verb == "exact") {
    if (x <= 10'000'000) return value_output(to_string(integers::exact_lhs_rational(x, model, u, sieve)), opt);
    std::vector<double> ud;
    for (const auto& r : u) ud.push_back(r.get_d());
    return value_output(format_real(integers::exact_lhs(x, model, {ud}, sieve, opt.threads)), opt);
  }
  // mc
  std::vector<double> ud;
  for (const auto& r : u) ud.push_back(r.get_d());
  const auto est = integers::mc_lhs(x, model, {ud}, opt.samples == 0 ? 100'000 : opt.samples, opt.seed, sieve);
  return table_output({"estimate", "stderr"}, {{format_real(est.estimate), format_real(est.stderr_)}}, opt);
}

inline std::uint32_t field_size(const Options& opt) {
  need(!opt.q.empty(), "--q", opt);
  const auto q = parse_scale(opt.q, "--q");
  detail::require(q <= 13 && poly::is_small_prime(static_cast<std::uint32_t>(q)), "--q must be a prime <= 13");
  return static_cast<std::uint32_t>(q);
}

inline poly::IrreducibleTable table_for(std::uint32_t q, int n) { return poly::cached_irreducibles(q, std::max(1, n / 2)); }

inline Output run_polys(const Options& opt) {
  const auto q = field_size(opt);
  need(!opt.n.empty(), "--n", opt);
  const int k = opt.k == 0 ? 2 : opt.k;
  if (opt.verb == "converge") {
    std::vector<DeviationReport> reports;
    for (auto n : parse_scales(opt.n, "--n")) {
      reports.push_back(poly::deviation_poly(q, static_cast<int>(n), k, opt.grid, table_for(q, static_cast<int>(n)), opt.tol, opt.threads));
    }
    return convergence_output(reports, opt);
  }
  const int n = static_cast<int>(parse_scale(opt.n, "--n"));
  if (opt.verb == "run") return deviation_output(poly::deviation_poly(q, n, k, opt.grid, table_for(q, n), opt.tol, opt.threads), opt);
  need(!opt.u.empty(), "--u", opt);
  return value_output(to_string(poly::exact_lhs_poly(q, n, k, parse_rational_list(opt.u), table_for(q, n))), opt);
}

inline Output run_perms(const Options& opt) {
  need(!opt.n.empty(), "--n", opt);
  const int k = opt.k == 0 ? 2 : opt.k;
  if (opt.verb == "converge") {
    std::vector<DeviationReport> reports;
    for (auto n : parse_scales(opt.n, "--n")) reports.push_back(perms::deviation_perm(static_cast<int>(n), k, opt.grid, opt.tol));
    return convergence_output(reports, opt);
  }
  const int n = static_cast<int>(parse_scale(opt.n, "--n"));
  need(!opt.u.empty(), "--u", opt);
  const auto u = parse_rational_list(opt.u);
  return value_output(to_string(opt.verb == "exact" ? perms::lhs_perm_exact(n, k, u) : perms::lhs_perm_brute(n, k, u)), opt);
}

inline Output run_series(const Options& opt) {
  if (opt.verb == "a0") {
    need(opt.p != 0, "--p", opt);
    need(opt.v != 0, "--v", opt);
    return value_output(to_string(series::a0_local_check(opt.p, opt.k == 0 ? 2 : opt.k, opt.v)), opt);
  }
  need(!opt.s.empty(), "--s", opt);
  std::vector<std::complex<double>> s;
  for (const auto& item : split_list(opt.s)) s.push_back(parse_complex(item));
  if (opt.verb == "primesum") {
    need(opt.p != 0, "--p", opt);
    detail::require(s.size() == 1, "primesum takes a single --s value");
    const auto model = model_from(opt);
    const auto z = series::prime_sum_diag(model, opt.j - 1, s[0], opt.p);
    return table_output({"re", "im"}, {{format_real(z.real()), format_real(z.imag())}}, opt);
  }
  detail::require(opt.k == 0 || opt.k == static_cast<int>(s.size()), "--k disagrees with the length of --s");
  series::SeriesValue r;
  if (opt.verb == "direct") {
    const auto n = opt.n.empty() ? std::uint64_t{1000} : parse_scale(opt.n, "--n");
    r = series::d_direct(s, n, arith::cached_sieve(std::max<std::uint64_t>(n, 2)));
  } else {
    need(opt.p != 0, "--p", opt);
    r = series::d_euler(s, opt.p, opt.v == 0 ? 40 : opt.v);
  }
  return table_output({"re", "im", "tail_bound"}, {{format_real(r.value.real()), format_real(r.value.imag()), format_real(r.tail_bound)}}, opt);
}

inline Output execute(const Options& opt) {
  detail::require(opt.format == "csv" || opt.format == "json", "--format must be csv or json");
  detail::require(opt.threads >= 1, "--threads must be at least 1");
  if (opt.kind == "dirichlet") return run_dirichlet(opt);
  if (opt.kind == "integers") return run_integers(opt);
  if (opt.kind == "polys") return run_polys(opt);
  if (opt.kind == "perms") return run_perms(opt);
  return run_series(opt);
}

// ---------------------------------------------------------------------------
// Entry point

namespace detail_cli {

inline void add_flags(CLI::App* sub, Options& opt, const std::set<std::string>& flags) {
  auto has = [&](const char* f) { return flags.count(f) > 0; };
  if (has("k")) sub->add_option("--k", opt.k, "number of parts / Dirichlet dimension");
  if (has("alpha")) sub->add_option("--alpha", opt.alpha, "Dirichlet parameters a1,a2,...");
  if (has("u")) sub->add_option("--u", opt.u, "rect corner u1,...,u_{k-1} (p/q accepted)");
  if (has("t")) sub->add_option("--t", opt.t, "simplex point t1,...,tk");
  if (has("s")) sub->add_option("--s", opt.s, "series point s1,...,sk (complex as a+bi)");
  if (has("x")) sub->add_option("--x", opt.x, "scale x (comma list for converge)");
  if (has("n")) sub->add_option("--n", opt.n, "degree / permutation size / truncation (comma list for converge)");
  if (has("q")) sub->add_option("--q", opt.q, "field size (prime <= 13)");
  if (has("model")) sub->add_option("--model", opt.model, "weight model id[:params]");
  if (has("grid")) sub->add_option("--grid", opt.grid, "rect grid step (1/G)");
  if (has("bins")) sub->add_option("--bins", opt.bins, "histogram bins per axis");
  if (has("threads")) sub->add_option("--threads", opt.threads, "worker shards");
  if (has("seed")) sub->add_option("--seed", opt.seed, "random seed");
  if (has("tol")) sub->add_option("--tol", opt.tol, "quadrature tolerance");
  if (has("samples")) sub->add_option("--samples", opt.samples, "number of samples");
  if (has("p")) sub->add_option("--p", opt.p, "prime (a0) or prime cutoff (euler, primesum)");
  if (has("v")) sub->add_option("--v", opt.v, "exponent cutoff");
  if (has("j")) sub->add_option("--j", opt.j, "coordinate, 1-based");
  sub->add_option("--format", opt.format, "csv or json");
  sub->add_option("--out", opt.out, "output file (default stdout)");
}

struct VerbSpec {
  const char* kind;
  const char* verb;
  const char* help;
  std::set<std::string> flags;
};

inline const std::vector<VerbSpec>& verbs() {
  static const std::vector<VerbSpec> table = {
      {"dirichlet", "cdf", "Dirichlet CDF at u", {"k", "alpha", "u", "tol"}},
      {"dirichlet", "density", "Dirichlet density at t", {"k", "alpha", "t"}},
      {"dirichlet", "sample", "draw Dirichlet samples", {"k", "alpha", "seed", "samples"}},
      {"integers", "exact", "exact left-hand side at u", {"k", "x", "u", "model", "threads"}},
      {"integers", "run", "grid deviation report", {"k", "x", "model", "grid", "bins", "threads", "tol"}},
      {"integers", "mc", "Monte Carlo left-hand side", {"k", "x", "u", "model", "seed", "samples"}},
      {"integers", "converge", "convergence study over --x", {"k", "x", "model", "grid", "bins", "threads", "tol"}},
      {"integers", "lemma43", "weighted divisor sum vs main term", {"x"}},
      {"polys", "exact", "exact left-hand side over F_q[T]", {"k", "q", "n", "u"}},
      {"polys", "run", "grid deviation report", {"k", "q", "n", "grid", "threads", "tol"}},
      {"polys", "converge", "convergence study over --n", {"k", "q", "n", "grid", "threads", "tol"}},
      {"perms", "exact", "binomial-product left-hand side", {"k", "n", "u"}},
      {"perms", "brute", "cycle-type enumeration", {"k", "n", "u"}},
      {"perms", "converge", "convergence study over --n", {"k", "n", "grid", "tol"}},
      {"series", "direct", "truncated multiple Dirichlet series", {"k", "s", "n"}},
      {"series", "euler", "truncated Euler product", {"k", "s", "p", "v"}},
      {"series", "a0", "local leading-coefficient check", {"k", "p", "v"}},
      {"series", "primesum", "prime-sum diagnostic", {"k", "model", "s", "p", "j"}},
  };
  return table;
}

inline int exit_for_exception(std::ostream& err) {
  try {
    throw;
  } catch (const resource_error& e) {
    err << "dirlaw: resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const integrity_error& e) {
    err << "dirlaw: integrity failure: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const std::domain_error& e) {
    err << "dirlaw: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "dirlaw: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "dirlaw: internal error: " << e.what() << '\n';
    return kExitIntegrity;
  }
}

}  // namespace detail_cli

/// Runs one command; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Divisor, polynomial and permutation factorization statistics vs Dirichlet laws", "dirlaw"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  std::string manifest_in, replay_out;
  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay->add_option("--manifest", manifest_in, "manifest JSON")->required();
  replay->add_option("--out", replay_out, "output file (default: the recorded path)");
  std::map<std::string, CLI::App*> kinds;
  for (const auto& spec : detail_cli::verbs()) {
    auto*& kind = kinds[spec.kind];
    if (kind == nullptr) {
      kind = app.add_subcommand(spec.kind);
      kind->require_subcommand(1);
    }
    auto* sub = kind->add_subcommand(spec.verb, spec.help);
    detail_cli::add_flags(sub, opt, spec.flags);
    sub->callback([&opt, &spec] {
      opt.kind = spec.kind;
      opt.verb = spec.verb;
    });
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (replay->parsed()) {
      std::ifstream is(manifest_in);
      if (!is) throw domain_error("cannot read manifest " + manifest_in);
      json manifest;
      try {
        manifest = json::parse(is);
      } catch (const json::exception& e) {
        throw domain_error(std::string("malformed manifest: ") + e.what());
      }
      auto recorded = manifest.at("args").get<std::vector<std::string>>();
      if (!replay_out.empty()) {
        std::vector<std::string> filtered;
        for (std::size_t i = 0; i < recorded.size(); ++i) {
          if (recorded[i] == "--out") {
            ++i;
          } else if (recorded[i].rfind("--out=", 0) != 0) {
            filtered.push_back(recorded[i]);
          }
        }
        filtered.push_back("--out");
        filtered.push_back(replay_out);
        recorded = std::move(filtered);
      }
      return run(recorded, out, err);
    }
    const Output result = execute(opt);
    if (opt.out.empty()) {
      out << result.text;
    } else {
      write_file(opt.out, result.text);
      write_file(manifest_path(opt.out), build_manifest(opt, args).dump(2) + "\n");
      out << result.summary << '\n';
    }
    return kExitOk;
  } catch (...) {
    return detail_cli::exit_for_exception(err);
  }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace dirlaw::cli
