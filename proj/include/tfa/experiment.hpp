#pragma once

// Experiment runner: key = value configs, Ω generators, one suite per kind,
// atomic artifact output. Pass/fail comes from the module checks and the
// frozen constants; nothing here computes its own numerics.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "bochner_riesz.hpp"
#include "calibrated_constants.hpp"
#include "decomposition.hpp"
#include "oracles.hpp"
#include "probe.hpp"
#include "random_configs.hpp"

namespace tfa::experiment {

inline const std::vector<std::string> kKinds = {"rf-baseline",     "model-oracle", "column-suite",
                                                "energy-suite",    "decompose-suite", "split-suite",
                                                "probe-sweep",     "counterexample", "bochner"};
inline const std::vector<std::string> kGenerators = {"random-disjoint", "aligned-strip", "whitney-disc"};

inline constexpr const char* kSummarySchema = "tfa-summary/1";
inline constexpr double kRegression = 1.5;  // allowed growth over a frozen constant

struct ConfigError : std::runtime_error {
  int line;
  std::string field;
  ConfigError(int l, std::string f, const std::string& msg)
      : std::runtime_error(msg), line(l), field(std::move(f)) {}
  std::string diagnostic(const std::string& source) const {
    std::ostringstream os;
    os << source << ':' << line << ": " << (field.empty() ? "" : field + ": ") << what();
    return os.str();
  }
};

struct OmegaParams {
  std::size_t count = 8;
  double extent = 8.0;
  std::size_t n = 8;
  StripOrientation orientation = StripOrientation::eta;
  int depth = 6;
  double radius = 2.0;
};

struct ExperimentConfig {
  std::string kind;
  std::optional<std::size_t> grid_n;
  std::optional<double> grid_period;
  std::uint64_t seed = 1;
  std::string omega_file;  // resolved against the config's directory
  std::string omega_generator;
  OmegaParams omega;
  std::optional<double> p, q;
  double r = 4.0;
  double eps = 0.25;
  std::optional<std::size_t> instances;
  std::vector<std::size_t> sizes;
  std::vector<double> p_grid;
  std::size_t setups = 6;
  int shell_depth = 12;
  std::string golden;  // decompose-suite: expected report.txt
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

template <class T>
T parse_number(const std::string& v, int line, const std::string& key) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError(line, key, "cannot parse '" + v + "' as a number");
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& v, int line, const std::string& key) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(trim(item), line, key));
  if (out.empty()) throw ConfigError(line, key, "empty list");
  return out;
}

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline bool known(const std::vector<std::string>& names, const std::string& v) {
  return std::find(names.begin(), names.end(), v) != names.end();
}

}  // namespace detail

/// Parses "key = value" lines; '#' starts a comment. Unknown keys, duplicate
/// keys and malformed values are errors with the offending line.
inline ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = ".") {
  using detail::parse_number;
  ExperimentConfig c;
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = detail::trim(std::string_view(raw).substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(text).substr(0, eq));
    const std::string v = detail::trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "", "missing key");
    if (v.empty()) throw ConfigError(line, key, "missing value");
    if (!seen.emplace(key, line).second)
      throw ConfigError(line, key, "duplicate key (first set on line " + std::to_string(seen[key]) + ")");

    if (key == "kind") {
      if (!detail::known(kKinds, v)) throw ConfigError(line, key, "unknown kind '" + v + "'");
      c.kind = v;
    } else if (key == "grid.n") {
      c.grid_n = parse_number<std::size_t>(v, line, key);
      if (!detail::is_power_of_two(*c.grid_n)) throw ConfigError(line, key, "must be a power of two");
    } else if (key == "grid.period") {
      c.grid_period = parse_number<double>(v, line, key);
      if (!(*c.grid_period > 0)) throw ConfigError(line, key, "must be positive");
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(v, line, key);
    } else if (key == "omega.file") {
      const std::filesystem::path p = std::filesystem::path(v).is_absolute() ? std::filesystem::path(v) : base_dir / v;
      if (!std::filesystem::exists(p)) throw ConfigError(line, key, "file not found: " + p.string());
      c.omega_file = p.string();
    } else if (key == "omega.generator") {
      if (!detail::known(kGenerators, v)) throw ConfigError(line, key, "unknown generator '" + v + "'");
      c.omega_generator = v;
    } else if (key == "omega.count") {
      c.omega.count = parse_number<std::size_t>(v, line, key);
    } else if (key == "omega.extent") {
      c.omega.extent = parse_number<double>(v, line, key);
      if (!(c.omega.extent > 0)) throw ConfigError(line, key, "must be positive");
    } else if (key == "omega.n") {
      c.omega.n = parse_number<std::size_t>(v, line, key);
      if (c.omega.n < 1) throw ConfigError(line, key, "must be at least 1");
    } else if (key == "omega.orientation") {
      if (v == "xi-strip") c.omega.orientation = StripOrientation::xi;
      else if (v == "eta-strip") c.omega.orientation = StripOrientation::eta;
      else throw ConfigError(line, key, "expected xi-strip or eta-strip");
    } else if (key == "omega.depth") {
      c.omega.depth = parse_number<int>(v, line, key);
      if (c.omega.depth < 0) throw ConfigError(line, key, "must be non-negative");
    } else if (key == "omega.radius") {
      c.omega.radius = parse_number<double>(v, line, key);
      if (!(c.omega.radius > 0)) throw ConfigError(line, key, "must be positive");
    } else if (key == "p" || key == "q") {
      const double x = parse_number<double>(v, line, key);
      if (!(x > 1)) throw ConfigError(line, key, "must exceed 1");
      (key == "p" ? c.p : c.q) = x;
    } else if (key == "r") {
      c.r = parse_number<double>(v, line, key);
      if (!(c.r >= 2)) throw ConfigError(line, key, "must be at least 2");
    } else if (key == "eps") {
      c.eps = parse_number<double>(v, line, key);
      if (!(c.eps > 0)) throw ConfigError(line, key, "must be positive");
    } else if (key == "instances") {
      c.instances = parse_number<std::size_t>(v, line, key);
    } else if (key == "sizes") {
      c.sizes = detail::parse_list<std::size_t>(v, line, key);
      for (auto s : c.sizes)
        if (s == 0) throw ConfigError(line, key, "sizes must be positive");
    } else if (key == "p_grid") {
      c.p_grid = detail::parse_list<double>(v, line, key);
      for (double p : c.p_grid)
        if (!(p >= 1)) throw ConfigError(line, key, "exponents must be at least 1");
    } else if (key == "setups") {
      c.setups = parse_number<std::size_t>(v, line, key);
      if (c.setups == 0) throw ConfigError(line, key, "must be positive");
    } else if (key == "shell_depth") {
      c.shell_depth = parse_number<int>(v, line, key);
      if (c.shell_depth < 3) throw ConfigError(line, key, "must be at least 3");
    } else if (key == "golden") {
      const std::filesystem::path p = std::filesystem::path(v).is_absolute() ? std::filesystem::path(v) : base_dir / v;
      c.golden = p.string();
    } else {
      throw ConfigError(line, key, "unknown key");
    }
  }
  if (!c.omega_file.empty() && !c.omega_generator.empty())
    throw ConfigError(seen["omega.generator"], "omega.generator", "omega.file and omega.generator are exclusive");
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config " + path.string());
  return parse_config(in, path.parent_path().empty() ? "." : path.parent_path());
}

/// Grid for a suite: the configured one, else the suite's reference grid.
inline Grid suite_grid(const ExperimentConfig& c) {
  Grid def = kTileGrid;
  if (c.kind == "model-oracle") def = Grid(256, 8.0);
  else if (c.kind == "probe-sweep" || c.kind == "counterexample") def = probe_grid();
  else if (c.kind == "bochner") def = Grid(1024, 64.0);
  return Grid(c.grid_n.value_or(def.n), c.grid_period.value_or(def.period));
}

// ------------------------------------------------------------ Ω sources

/// Squares as "j k1 k2" lines (side 2^j, positions k1, k2); '#' comments.
inline SquareCollection read_omega(std::istream& in) {
  std::vector<FrequencySquare> v;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = detail::trim(std::string_view(raw).substr(0, raw.find('#')));
    if (text.empty()) continue;
    std::istringstream ls(text);
    int j;
    std::int64_t k1, k2;
    std::string extra;
    if (!(ls >> j >> k1 >> k2) || (ls >> extra))
      throw ConfigError(line, "omega.file", "expected 'j k1 k2'");
    v.emplace_back(j, k1, k2);
  }
  return SquareCollection(std::move(v));
}

inline std::string write_omega(const SquareCollection& omega) {
  std::ostringstream os;
  for (const auto& w : omega) os << w.scale() << ' ' << w.omega1.position << ' ' << w.omega2.position << '\n';
  return os.str();
}

/// Disjoint squares from a named generator; fails loudly rather than
/// returning fewer squares than asked for.
inline SquareCollection generate_omega(const std::string& generator, const OmegaParams& prm, std::uint64_t seed,
                                       const Grid& grid) {
  SquareCollection out;
  if (generator == "random-disjoint") {
    if (!grid.representable(-0.1 * prm.extent, 1.1 * prm.extent))
      throw std::invalid_argument("generate_omega: extent " + std::to_string(prm.extent) +
                                  " exceeds the Nyquist band of the grid");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> scale(-1, 1);
    constexpr int kAttempts = 10000;
    for (int attempt = 0; attempt < kAttempts && out.size() < prm.count; ++attempt) {
      const int j = scale(rng);
      if (std::ldexp(1.0, j) > prm.extent) continue;
      out.try_insert(FrequencySquare(random_dyadic_in({0, prm.extent}, j, rng), random_dyadic_in({0, prm.extent}, j, rng)));
    }
    if (out.size() < prm.count)
      throw std::runtime_error("generate_omega: placed " + std::to_string(out.size()) + " of " +
                               std::to_string(prm.count) + " squares in " + std::to_string(kAttempts) + " attempts");
  } else if (generator == "aligned-strip") {
    out = counterexample_config(prm.n, prm.orientation, grid);
  } else if (generator == "whitney-disc") {
    if (!grid.representable(-prm.radius, prm.radius))
      throw std::invalid_argument("generate_omega: disc radius exceeds the Nyquist band of the grid");
    out = whitney_cover(OpenRegion::disc(0.0, 0.0, prm.radius), prm.depth);
  } else {
    throw std::invalid_argument("generate_omega: unknown generator '" + generator + "'");
  }
  if (!out.pairwise_disjoint()) throw std::logic_error("generate_omega: generated squares overlap");
  return out;
}

/// Ω from the config, or nullopt when the suite should use its default family.
inline std::optional<SquareCollection> configured_omega(const ExperimentConfig& c, const Grid& grid) {
  if (!c.omega_file.empty()) {
    std::ifstream in(c.omega_file);
    return read_omega(in);
  }
  if (!c.omega_generator.empty()) return generate_omega(c.omega_generator, c.omega, c.seed, grid);
  return std::nullopt;
}

// ------------------------------------------------------------ suites

struct SuiteResult {
  SuiteResult(std::string k, std::uint64_t s) : kind(std::move(k)), seed(s) {}
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<std::string> failures;
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
  std::map<std::string, std::string> artifacts;  // file name → content
  bool passed() const { return failures.empty(); }
};

namespace detail {

struct Csv {
  std::ostringstream os;
  explicit Csv(const std::string& header) { os << std::setprecision(12) << header << '\n'; }
  template <class... T>
  void row(const T&... v) {
    std::size_t i = 0;
    ((os << (i++ ? "," : "") << v), ...);
    os << '\n';
  }
};

inline void check(SuiteResult& res, bool ok, const std::string& what) {
  if (!ok) res.failures.push_back(what);
}

inline std::string at(std::size_t i) { return "instance " + std::to_string(i) + ": "; }

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

}  // namespace detail

/// ‖RF_r f‖_p/‖f‖_p over a p-grid, with sharp cut-offs on a partition of the
/// band of f. The r = 2, p = 2 row is Plancherel.
inline SuiteResult run_rf_baseline(const ExperimentConfig& c) {
  SuiteResult res{"rf-baseline", c.seed};
  const Grid grid = suite_grid(c);
  const Interval band{-4.0, 4.0};
  std::vector<Interval> parts;
  for (double a = band.lo; a < band.hi; a += 1.0) parts.push_back({a, a + 1.0});
  const std::vector<double> ps = c.p_grid.empty() ? std::vector<double>{1.5, 2, 3, 4, 6} : c.p_grid;
  const std::size_t n = c.instances.value_or(20);
  std::mt19937_64 rng(c.seed);
  detail::Csv csv("instance,r,p,ratio");
  double worst_plancherel = 0, worst_rf = 0;
  for (std::size_t i = 0; i < n; ++i) {
    SampledFunction f = random_bandlimited(grid, band, rng);
    const double norm = l2_norm(f);
    for (auto& v : f.values) v /= norm;
    for (double r : {2.0, c.r}) {
      const SampledFunction rf = eval_RF_r(f, parts, r, true);
      for (double p : ps) csv.row(i, r, p, lp_norm(rf, p) / lp_norm(f, p));
      const double l2 = l2_norm(rf);
      if (r == 2) {
        worst_plancherel = std::max(worst_plancherel, std::abs(l2 - 1));
        detail::check(res, std::abs(l2 - 1) <= 1e-9, detail::at(i) + "Plancherel off by " + detail::fmt(l2 - 1));
      } else {
        worst_rf = std::max(worst_rf, l2 - 1);
        detail::check(res, l2 <= 1 + 1e-9, detail::at(i) + "RF_r exceeds the L2 norm by " + detail::fmt(l2 - 1));
      }
    }
  }
  res.stats["instances"] = n;
  res.stats["plancherel_max_defect"] = worst_plancherel;
  res.stats["rf_r_max_excess"] = worst_rf;
  res.artifacts["rf_baseline.csv"] = csv.os.str();
  return res;
}

/// Fast evaluators against direct O(N²) sums. Tolerance 1e-8 relative to max|oracle|.
inline SuiteResult run_model_oracle(const ExperimentConfig& c) {
  SuiteResult res{"model-oracle", c.seed};
  const Grid grid = suite_grid(c);
  const std::size_t n = c.instances.value_or(20);
  const auto fixed = configured_omega(c, grid);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> cut(0, 4);
  detail::Csv csv("instance,operator,rel_error");
  std::map<std::string, double> worst;
  for (std::size_t i = 0; i < n; ++i) {
    OmegaParams prm;
    prm.count = 1 + i % 4;
    prm.extent = 4.0;
    const SquareCollection omega = fixed ? *fixed : generate_omega("random-disjoint", prm, rng(), grid);
    const SampledFunction f = random_bandlimited(grid, {0, 4}, rng), g = random_bandlimited(grid, {0, 4}, rng);
    std::vector<double> cuts{0, cut(rng), cut(rng), cut(rng), 4};
    std::sort(cuts.begin(), cuts.end());
    std::vector<Interval> parts;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      if (cuts[k + 1] > cuts[k]) parts.push_back({cuts[k], cuts[k + 1]});
    std::vector<Interval> lp;
    for (double a = -4; a < 4; a += 1) lp.push_back({a, a + 1});
    const TileCollection S = tiles_from_squares(omega, {-2, 2});
    const std::vector<std::pair<std::string, double>> errs = {
        {"T_r", oracle::rel_error(eval_T_r(f, g, omega, c.r, false), oracle::T_r(f, g, omega, c.r, false))},
        {"T_r_sharp", oracle::rel_error(eval_T_r(f, g, omega, c.r, true), oracle::T_r(f, g, omega, c.r, true))},
        {"RF_r", oracle::rel_error(eval_RF_r(f, parts, c.r, false), oracle::RF_r(f, parts, c.r, false))},
        {"RF_r_sharp", oracle::rel_error(eval_RF_r(f, parts, c.r, true), oracle::RF_r(f, parts, c.r, true))},
        {"LP", oracle::rel_error(eval_LP(f, g, lp, c.r), oracle::LP(f, g, lp, c.r))},
        {"model", oracle::rel_error(eval_model(f, g, S, c.r), oracle::model(f, g, S, c.r))}};
    for (const auto& [name, e] : errs) {
      csv.row(i, name, e);
      worst[name] = std::max(worst[name], e);
      detail::check(res, e <= 1e-8, detail::at(i) + name + " relative error " + detail::fmt(e));
    }
  }
  res.stats["instances"] = n;
  for (const auto& [name, e] : worst) res.stats["max_rel_error"][name] = e;
  res.artifacts["model_oracle.csv"] = csv.os.str();
  return res;
}

/// Column and row estimates on random stacks of 1-64 tiles, plus g-orthogonality.
inline SuiteResult run_column_suite(const ExperimentConfig& c) {
  SuiteResult res{"column-suite", c.seed};
  const Grid grid = suite_grid(c);
  const std::size_t n = c.instances.value_or(100);
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<std::size_t> size(1, 64);
  detail::Csv csv("instance,size,column_ratio,row_ratio,g_orthogonality_ratio");
  const double cap = kRegression * calibrated::kColumnEstimate, gcap = kRegression * calibrated::kGOrthogonality;
  double wc = 0, wr = 0, wg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Column C = random_column(rng, c.sizes.empty() ? size(rng) : c.sizes[i % c.sizes.size()]);
    detail::check(res, C.valid(), detail::at(i) + "generated column is not a column");
    const SampledFunction f = random_bandlimited(grid, kTileBand, rng), g = random_bandlimited(grid, kTileBand, rng);
    const SequenceH h = random_h(grid, C.squares(), rng);
    const double col = column_estimate_sides(C, f, g, h).ratio();
    const double row = row_estimate_sides(reflect(C), f, g, reflect(h)).ratio();
    const double go = column_g_orthogonality(C, g).ratio();
    csv.row(i, C.size(), col, row, go);
    wc = std::max(wc, col);
    wr = std::max(wr, row);
    wg = std::max(wg, go);
    detail::check(res, col <= cap, detail::at(i) + "column ratio " + detail::fmt(col) + " above " + detail::fmt(cap));
    detail::check(res, row <= cap, detail::at(i) + "row ratio " + detail::fmt(row) + " above " + detail::fmt(cap));
    detail::check(res, go <= gcap, detail::at(i) + "g-orthogonality ratio " + detail::fmt(go) + " above " + detail::fmt(gcap));
  }
  res.stats["instances"] = n;
  res.stats["max_column_ratio"] = wc;
  res.stats["max_row_ratio"] = wr;
  res.stats["max_g_orthogonality_ratio"] = wg;
  res.artifacts["column_suite.csv"] = csv.os.str();
  return res;
}

/// Greedy energies against the L2 / ℓ^{r'} norms, globally and on S(I₀).
inline SuiteResult run_energy_suite(const ExperimentConfig& c) {
  SuiteResult res{"energy-suite", c.seed};
  const Grid grid = suite_grid(c);
  const double rp = conjugate(c.r);
  const std::size_t n = c.instances.value_or(100);
  std::mt19937_64 rng(c.seed);
  detail::Csv csv("instance,tiles,energy_f,energy_g,energy_h,local_f,local_h");
  std::array<double, 5> worst{};
  const std::array<double, 5> caps = {calibrated::kEnergyPairing, calibrated::kEnergyPairing, calibrated::kEnergyH,
                                      calibrated::kLocalEnergyF, calibrated::kLocalEnergyH};
  const std::array<const char*, 5> names = {"energy_f/|f|_2", "energy_g/|g|_2", "energy_h/|h|_r'",
                                            "local energy_f", "local energy_h"};
  for (std::size_t i = 0; i < n; ++i) {
    const TileInstance in = random_tile_instance(rng, 1 + i % 8, 150, grid);
    FormData data(in.f, in.g, in.h, c.r);
    const EnergyReport ef = energy_f(in.S, data), eg = energy_g(in.S, data), eh = energy_h(in.S, data);
    detail::check(res, energy_witness_admissible_f(ef, data, 1), detail::at(i) + "energy_f witness not admissible");
    detail::check(res, energy_witness_admissible_f(eg, data, 2), detail::at(i) + "energy_g witness not admissible");
    detail::check(res, energy_witness_admissible_h(eh, data), detail::at(i) + "energy_h witness not admissible");
    std::array<double, 5> ratio = {ef.value / l2_norm(in.f), eg.value / l2_norm(in.g),
                                   eh.value / lp_norm(in.h.aggregate(rp), rp), 0, 0};
    const DyadicInterval I0 = random_dyadic_in({-4, 4}, static_cast<int>(i % 3), rng);
    const TileCollection local = restrict(in.S, I0);
    if (!local.empty()) {
      ratio[3] = energy_f(local, data).value / localized_l2(in.f, I0.interval());
      ratio[4] = energy_h(local, data).value / localized_h_norm(in.h, I0.interval(), rp);
    }
    csv.row(i, in.S.size(), ratio[0], ratio[1], ratio[2], ratio[3], ratio[4]);
    for (std::size_t k = 0; k < 5; ++k) {
      worst[k] = std::max(worst[k], ratio[k]);
      detail::check(res, ratio[k] <= kRegression * caps[k],
                    detail::at(i) + names[k] + " ratio " + detail::fmt(ratio[k]) + " above " +
                        detail::fmt(kRegression * caps[k]));
    }
  }
  res.stats["instances"] = n;
  for (std::size_t k = 0; k < 5; ++k) res.stats["max_ratio"][names[k]] = worst[k];
  res.artifacts["energy_suite.csv"] = csv.os.str();
  return res;
}

/// Text report of one f stopping time and one splitting on the first instance
/// drawn from `seed`; the regression golden.
inline std::string decomposition_report(std::uint64_t seed, double r) {
  std::mt19937_64 rng(seed);
  const TileInstance in = random_tile_instance(rng, 6, 80);
  FormData data(in.f, in.g, in.h, r);
  const double S1 = size_f(in.S, data).value, E1 = energy_f(in.S, data).value;
  return report(decompose_f(in.S, start_level(S1, E1), E1, data)) + report(split(in.S, data));
}

/// Stopping-time postconditions (exact partition, size halving: no tolerance),
/// top-measure bounds, and the generic estimate for three weight choices.
inline SuiteResult run_decompose_suite(const ExperimentConfig& c) {
  SuiteResult res{"decompose-suite", c.seed};
  const Grid grid = suite_grid(c);
  const double rp = conjugate(c.r);
  const std::size_t n = c.instances.value_or(200);
  std::mt19937_64 rng(c.seed);
  detail::Csv csv("instance,side,tiles,n0,extracted,measure_ratio,generic_ratio");
  const std::vector<std::array<double, 3>> weights = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {0, 0, 1}, {0.5, 0, 0.5}};
  double worst_fg = 0, worst_h = 0, worst_generic = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Side side = i % 3 == 0 ? Side::f : i % 3 == 1 ? Side::g : Side::h;
    const TileInstance in = random_tile_instance(rng, 1 + i % 8, 100, grid);
    FormData data(in.f, in.g, in.h, c.r);
    const EnergyReport e = side == Side::f ? energy_f(in.S, data) : side == Side::g ? energy_g(in.S, data) : energy_h(in.S, data);
    const int n0 = start_level(::tfa::detail::side_size(side, in.S, data), e.value);
    const Partition P = decompose(side, in.S, n0, e.value, data);
    const PartitionCheck chk = check_partition(in.S, P, data);
    detail::check(res, chk.exact_partition, detail::at(i) + "partition is not exact");
    detail::check(res, chk.disjoint_families, detail::at(i) + "stacks are not disjoint");
    detail::check(res, chk.size_halved, detail::at(i) + "residual size not halved");
    detail::check(res, chk.work_bounded, detail::at(i) + "work bound exceeded");
    const double cap = kRegression * (side == Side::h ? calibrated::kDecomposeMeasureH : calibrated::kDecomposeMeasureFG);
    (side == Side::h ? worst_h : worst_fg) = std::max(side == Side::h ? worst_h : worst_fg, chk.measure_ratio);
    detail::check(res, chk.measure_ratio <= cap,
                  detail::at(i) + "top measure ratio " + detail::fmt(chk.measure_ratio) + " above " + detail::fmt(cap));

    // Generic estimate: |f| ≤ 1_F, |g| ≤ 1_G, ℓ^{r'} aggregate of h at most 1.
    const SampledFunction F = indicator_of(grid, random_interval_union(rng));
    const SampledFunction G = indicator_of(grid, random_interval_union(rng));
    const SampledFunction f = dominated_by(random_bandlimited(grid, kTileBand, rng), F);
    const SampledFunction g = dominated_by(random_bandlimited(grid, kTileBand, rng), G);
    SequenceH h = random_h(grid, in.S.squares(), rng);
    normalize_aggregate(h, rp);
    FormData gd(f, g, h, c.r);
    GenericBoundInputs gin = measure_generic_inputs(in.S, gd, F, G);
    const double lambda = std::abs(trilinear_form(gd, in.S));
    double generic = 0;
    for (const auto& w : weights) {
      gin.theta = gin.beta = w;
      const double bound = generic_bound(gin, c.r);
      if (bound > 0) generic = std::max(generic, lambda / bound);
      else detail::check(res, lambda == 0, detail::at(i) + "nonzero form against a zero bound");
    }
    worst_generic = std::max(worst_generic, generic);
    detail::check(res, generic <= kRegression * calibrated::kGenericEstimate,
                  detail::at(i) + "|Lambda|/generic bound " + detail::fmt(generic) + " above " +
                      detail::fmt(kRegression * calibrated::kGenericEstimate));
    std::size_t extracted = 0;
    for (const auto& C : P.columns) extracted += C.size();
    for (const auto& R : P.rows) extracted += R.size();
    csv.row(i, side_name(side), in.S.size(), n0, extracted, chk.measure_ratio, generic);
  }
  const std::string rep = decomposition_report(c.seed, c.r);
  if (!c.golden.empty()) {
    std::ifstream gin(c.golden);
    if (!gin) {
      res.failures.push_back("golden report " + c.golden + " is missing");
    } else {
      const std::string want((std::istreambuf_iterator<char>(gin)), std::istreambuf_iterator<char>());
      detail::check(res, want == rep, "report differs from golden " + c.golden);
    }
  }
  res.stats["instances"] = n;
  res.stats["max_measure_ratio_fg"] = worst_fg;
  res.stats["max_measure_ratio_h"] = worst_h;
  res.stats["max_generic_ratio"] = worst_generic;
  res.artifacts["decompose_suite.csv"] = csv.os.str();
  res.artifacts["report.txt"] = rep;
  return res;
}

inline SuiteResult run_split_suite(const ExperimentConfig& c) {
  SuiteResult res{"split-suite", c.seed};
  const Grid grid = suite_grid(c);
  const std::size_t n = c.instances.value_or(40);
  std::mt19937_64 rng(c.seed);
  detail::Csv csv("instance,tiles,n_start,levels,remainder,measure_ratio");
  const double cap = kRegression * calibrated::kSplitMeasure;
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const TileInstance in = random_tile_instance(rng, 1 + i % 8, 120, grid);
    FormData data(in.f, in.g, in.h, c.r);
    const Splitting sp = split(in.S, data);
    const SplittingCheck chk = check_splitting(in.S, sp, data);
    detail::check(res, chk.exact_partition, detail::at(i) + "splitting is not an exact partition");
    detail::check(res, chk.disjoint_families, detail::at(i) + "stacks within a family overlap");
    detail::check(res, chk.caps_hold, detail::at(i) + "level size caps violated");
    detail::check(res, chk.measure_ratio <= cap,
                  detail::at(i) + "top measure ratio " + detail::fmt(chk.measure_ratio) + " above " + detail::fmt(cap));
    worst = std::max(worst, chk.measure_ratio);
    csv.row(i, in.S.size(), sp.n_start, sp.levels.size(), sp.remainder.size(), chk.measure_ratio);
  }
  res.stats["instances"] = n;
  res.stats["max_measure_ratio"] = worst;
  res.artifacts["split_suite.csv"] = csv.os.str();
  return res;
}

inline std::string point_json(const SweepPoint& p) {
  nlohmann::ordered_json j = to_json(p.report);
  j["best_setup"] = p.best_setup;
  return j.dump(2) + "\n";
}

/// Restricted-type ratios over nested Ω; passes when they stay within a factor 2.
inline SuiteResult run_probe_sweep(const ExperimentConfig& c) {
  SuiteResult res{"probe-sweep", c.seed};
  const Grid grid = suite_grid(c);
  std::optional<SquareCollection> omega = configured_omega(c, grid);
  if (!omega) {
    OmegaParams prm;
    prm.count = 64;
    prm.extent = 16.0;
    omega = generate_omega("random-disjoint", prm, c.seed, grid);
  }
  const std::vector<std::size_t> sizes = c.sizes.empty() ? std::vector<std::size_t>{1, 4, 16, 64} : c.sizes;
  for (auto s : sizes)
    if (s > omega->size()) throw std::invalid_argument("probe-sweep: size " + std::to_string(s) + " exceeds |Omega|");
  std::mt19937_64 rng(c.seed);
  std::vector<ProbeSetup> setups;
  const SquareCollection first({(*omega)[0]});
  for (std::size_t k = 0; k < c.setups; ++k) setups.push_back(random_setup(grid, first, rng));
  ProbeOptions opt;
  opt.hmode = HMode::extremal;
  opt.seed = c.seed;
  const ExponentTuple ex(c.p.value_or(3.0), c.q.value_or(3.0), c.r);
  const auto pts = probe_sweep(omega->squares(), sizes, setups, ex, opt);
  std::vector<std::pair<std::string, ProbeReport>> runs;
  for (const auto& p : pts) {
    runs.emplace_back("omega" + std::to_string(p.squares), p.report);
    res.artifacts["probe_" + std::to_string(p.squares) + ".json"] = point_json(p);
  }
  const double spread = sweep_spread(pts);
  detail::check(res, spread < 2.0, "ratio spread " + detail::fmt(spread) + " is not below 2");
  res.stats["spread"] = spread;
  res.stats["monotone"] = monotone_trend(pts);
  for (const auto& p : pts) res.stats["ratio"].push_back(p.report.ratio);
  res.artifacts["sweep.csv"] = csv_summary(runs);
  res.artifacts["omega.txt"] = write_omega(*omega);
  return res;
}

/// The aligned-strip configuration over a sweep of N; passes when the ratio
/// is non-decreasing in N. The growth factor is reported.
inline SuiteResult run_counterexample(const ExperimentConfig& c) {
  SuiteResult res{"counterexample", c.seed};
  const Grid grid = suite_grid(c);
  const std::vector<std::size_t> Ns = c.sizes.empty() ? std::vector<std::size_t>{4, 8, 16, 32, 64} : c.sizes;
  const ExponentTuple ex(c.p.value_or(1.2), c.q.value_or(3.0), c.r);
  ProbeOptions opt;
  opt.seed = c.seed;
  const auto pts = counterexample_sweep(Ns, c.omega.orientation, ex, grid, opt);
  std::vector<std::pair<std::string, ProbeReport>> runs;
  for (const auto& p : pts) {
    runs.emplace_back("N" + std::to_string(p.squares), p.report);
    res.artifacts["counterexample_" + std::to_string(p.squares) + ".json"] = point_json(p);
  }
  const bool mono = monotone_trend(pts);
  detail::check(res, mono, "ratio is not monotone in N");
  res.stats["monotone"] = mono;
  res.stats["growth"] = pts.back().report.ratio / pts.front().report.ratio;
  for (const auto& p : pts) res.stats["ratio"].push_back(p.report.ratio);
  res.artifacts["counterexample.csv"] = csv_summary(runs);
  return res;
}

/// Rough symbol over a Whitney cover of the disc: pointwise ℓ^r domination on
/// random pairs, and shell counts #Ω_n against C·2^n.
inline SuiteResult run_bochner(const ExperimentConfig& c) {
  SuiteResult res{"bochner", c.seed};
  const Grid grid = suite_grid(c);
  const SymbolParams prm{c.r, c.eps, 1};
  const OpenRegion region = OpenRegion::disc(0.0, 0.0, c.omega.radius);
  std::optional<SquareCollection> cover = configured_omega(c, grid);
  if (!cover) cover = generate_omega("whitney-disc", c.omega, c.seed, grid);
  const RoughSymbol m = build_symbol(region, *cover, prm);
  const std::size_t n = c.instances.value_or(20);
  const double reach = std::min(1.5 * c.omega.radius, 0.9 * grid.nyquist());
  std::mt19937_64 rng(c.seed);
  detail::Csv csv("instance,max_excess,max_lhs,max_rhs");
  double worst = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const SampledFunction f = random_bandlimited(grid, {-reach, reach}, rng);
    const SampledFunction g = random_bandlimited(grid, {-reach, reach}, rng);
    const Domination d = lr_domination(f, g, m);
    csv.row(i, d.max_excess, oracle::max_abs(d.lhs), oracle::max_abs(d.rhs));
    worst = std::max(worst, d.max_excess);
    detail::check(res, d.holds(1e-8), detail::at(i) + "domination fails by " + detail::fmt(d.max_excess));
  }
  const auto counts = shell_counts(whitney_cover(region, c.shell_depth), region);
  const ShellFit fit = fit_shell_counts(counts, 2, c.shell_depth - 1);
  detail::check(res, fit.slope >= 0.7 && fit.slope <= 1.3, "shell count slope " + detail::fmt(fit.slope) + " outside [0.7, 1.3]");
  detail::check(res, fit.max_ratio <= kRegression * calibrated::kShellCount,
                "max #Omega_n/2^n " + detail::fmt(fit.max_ratio) + " above " +
                    detail::fmt(kRegression * calibrated::kShellCount));
  res.stats["instances"] = n;
  res.stats["cover_squares"] = cover->size();
  res.stats["max_excess"] = worst;
  res.stats["shell_factor"] = shell_factor(m.cover, region, prm);
  res.stats["shell_slope"] = fit.slope;
  res.stats["shell_max_ratio"] = fit.max_ratio;
  res.artifacts["domination.csv"] = csv.os.str();
  res.artifacts["shells.csv"] = shell_histogram_csv(counts);
  return res;
}

/// Runs the suite named by c.kind. Exceptions from the modules become failures.
inline SuiteResult run_suite(const ExperimentConfig& c) {
  static const std::map<std::string, SuiteResult (*)(const ExperimentConfig&)> table = {
      {"rf-baseline", run_rf_baseline},       {"model-oracle", run_model_oracle},
      {"column-suite", run_column_suite},     {"energy-suite", run_energy_suite},
      {"decompose-suite", run_decompose_suite}, {"split-suite", run_split_suite},
      {"probe-sweep", run_probe_sweep},       {"counterexample", run_counterexample},
      {"bochner", run_bochner}};
  const auto it = table.find(c.kind);
  if (it == table.end()) throw ConfigError(0, "kind", "unknown or missing kind '" + c.kind + "'");
  try {
    return it->second(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    SuiteResult res{c.kind, c.seed};
    res.failures.push_back(std::string("error: ") + e.what());
    return res;
  }
}

// ------------------------------------------------------------ output

inline nlohmann::ordered_json summary_json(const SuiteResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = kSummarySchema;
  j["kind"] = r.kind;
  j["seed"] = r.seed;
  j["passed"] = r.passed();
  j["failures"] = r.failures;
  j["stats"] = r.stats;
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& [name, _] : r.artifacts) j["artifacts"].push_back(name);
  return j;
}

/// Writes to a sibling temp file and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_outputs(const SuiteResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : r.artifacts) write_atomic(dir / name, content);
  write_atomic(dir / "summary.json", summary_json(r).dump(2) + "\n");
}

inline constexpr int kExitPass = 0, kExitFail = 1, kExitConfig = 2;

}  // namespace tfa::experiment
