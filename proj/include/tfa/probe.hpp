#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <iomanip>
#include <numbers>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "size_energy.hpp"

namespace tfa {

// ---------------------------------------------------------------- grid sets

/// A finite union of grid cells [x_i, x_i + dx); membership is decided at the sample x_i.
struct GridSet {
  Grid grid;
  std::vector<char> mask;

  GridSet() = default;
  explicit GridSet(const Grid& g) : grid(g), mask(g.n, 0) {}

  static GridSet from_intervals(const Grid& g, const std::vector<Interval>& parts) {
    GridSet out(g);
    for (std::size_t i = 0; i < g.n; ++i)
      for (const auto& I : parts)
        if (I.contains(g.x(i))) out.mask[i] = 1;
    return out;
  }
  template <class Pred>
  static GridSet where(const Grid& g, Pred&& pred) {
    GridSet out(g);
    for (std::size_t i = 0; i < g.n; ++i) out.mask[i] = pred(i) ? 1 : 0;
    return out;
  }

  std::size_t count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }
  double measure() const { return static_cast<double>(count()) * grid.spacing(); }
  bool empty() const { return count() == 0; }
  bool contains(std::size_t i) const { return mask[i] != 0; }

  SampledFunction indicator() const {
    SampledFunction out(grid);
    for (std::size_t i = 0; i < grid.n; ++i) out.values[i] = mask[i] ? 1.0 : 0.0;
    return out;
  }
  GridSet minus(const GridSet& o) const {
    return where(grid, [&](std::size_t i) { return mask[i] && !o.mask[i]; });
  }
  GridSet unite(const GridSet& o) const {
    return where(grid, [&](std::size_t i) { return mask[i] || o.mask[i]; });
  }
  bool subset_of(const GridSet& o) const {
    for (std::size_t i = 0; i < grid.n; ++i)
      if (mask[i] && !o.mask[i]) return false;
    return true;
  }
  /// Maximal runs of cells as intervals (not wrapped around the period).
  std::vector<Interval> runs() const {
    std::vector<Interval> out;
    const double dx = grid.spacing();
    for (std::size_t i = 0; i < grid.n;) {
      if (!mask[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < grid.n && mask[j]) ++j;
      out.push_back({grid.x(i), grid.x(j - 1) + dx});
      i = j;
    }
    return out;
  }
};

/// Distance on the circle ℝ/Lℤ from I to the nearest cell of `set`; +∞ if `set` is empty.
inline double distance_to_set(const Interval& I, const GridSet& set) {
  const Grid& g = set.grid;
  const double L = g.period, dx = g.spacing();
  double best = kInf;
  for (std::size_t i = 0; i < g.n; ++i) {
    if (!set.mask[i]) continue;
    for (double shift : {-L, 0.0, L}) {
      const Interval cell{g.x(i) + shift, g.x(i) + shift + dx};
      const double d = std::max({0.0, cell.lo - I.hi, I.lo - cell.hi});
      best = std::min(best, d);
    }
    if (best == 0) return 0;
  }
  return best;
}

// ---------------------------------------------------------------- exceptional set

struct ExceptionalSet {
  GridSet set;
  double C = 0;
  int doublings = 0;
};

/// {ℳ1_F > C|F|/unit} ∪ {ℳ1_G > C|G|/unit}; `unit` is |H|, the measure that
/// normalizes the other two. With `escalate`, C doubles until |𝓔| < unit/2.
inline ExceptionalSet exceptional_set(const GridSet& F, const GridSet& G, double C, bool escalate = true,
                                      double unit = 1.0) {
  if (F.empty() || G.empty()) throw std::invalid_argument("exceptional_set: F and G must have positive measure");
  if (!(C > 0)) throw std::invalid_argument("exceptional_set: C must be positive");
  const SampledFunction MF = maximal_function(F.indicator()), MG = maximal_function(G.indicator());
  const double f = F.measure() / unit, g = G.measure() / unit;
  ExceptionalSet out;
  for (;;) {
    out.C = C;
    out.set = GridSet::where(F.grid, [&](std::size_t i) { return MF[i].real() > C * f || MG[i].real() > C * g; });
    if (!escalate || out.set.measure() < 0.5 * unit) return out;
    C *= 2;
    ++out.doublings;
    if (out.doublings > 200) throw std::runtime_error("exceptional_set: escalation did not terminate");
  }
}

// ---------------------------------------------------------------- stratification

/// d with 2^d ≤ 1 + dist(I_s, 𝓔^c)/|I_s| < 2^{d+1}.
inline int distance_band(const TriTile& s, const GridSet& complement) {
  const double v = 1.0 + distance_to_set(s.spatial.interval(), complement) / s.spatial.length();
  if (!std::isfinite(v)) throw std::invalid_argument("stratify: the exceptional set covers the whole period");
  return static_cast<int>(std::floor(std::log2(v)));
}

inline std::map<int, TileCollection> stratify(const TileCollection& S, const GridSet& E) {
  const GridSet complement = GridSet::where(E.grid, [&](std::size_t i) { return !E.mask[i]; });
  std::map<int, TileCollection> out;
  for (const auto& s : S) out[distance_band(s, complement)].push_back(s);
  return out;
}

// ---------------------------------------------------------------- interval selection

/// χ̃_I weights the averages of 1_F and 1_G, χ̃_I^{M r'} those of 1_{H'}.
enum class Weight { f_avg, g_avg, h_avg };

inline double selection_exponent(Weight w, double r_prime) {
  return w == Weight::h_avg ? kChiExponent * kChiPower * r_prime : kChiExponent;
}

/// Levels scanned below the largest average before the rest goes to a floor bucket.
inline constexpr int kSelectionLevels = 40;

struct SelectedInterval {
  DyadicInterval interval;
  double average = 0;
  TileCollection tiles;
};

struct IntervalSelection {
  int n_min = 0, n_floor = 0;
  std::map<int, std::vector<SelectedInterval>> levels;
};

/// |I|^{-1} ∫ u χ̃_I^{exponent/10}, with χ̃ measured on the circle.
inline double chi_average(const SampledFunction& u, const Interval& I, double exponent) {
  const SampledFunction chi = chi_tilde_on(u.grid, I, exponent);
  double acc = 0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::abs(u[i]) * chi[i].real();
  return acc * u.grid.spacing() / I.length();
}

/// Stopping time over dyadic intervals: for n = n_min, n_min+1, … pick, among
/// intervals containing some available tile with average in (2^{-n-1}, 2^{-n}],
/// the maximal ones (largest, then leftmost), and give each the available
/// tiles inside it. Ancestors are considered up to a quarter of the period.
inline IntervalSelection select_intervals(const TileCollection& S, const SampledFunction& u, double exponent) {
  IntervalSelection out;
  if (S.empty()) return out;
  const int max_scale = static_cast<int>(std::floor(std::log2(u.grid.period / 4)));
  std::map<DyadicInterval, double> avg;
  for (const auto& s : S)
    for (DyadicInterval I = s.spatial; I.scale <= std::max(max_scale, s.spatial.scale); I = I.parent()) {
      if (avg.count(I)) continue;
      avg[I] = chi_average(u, I.interval(), exponent);
      if (I.scale >= max_scale) break;
    }
  double top = 0;
  for (const auto& [I, a] : avg) top = std::max(top, a);
  out.n_min = top > 0 ? static_cast<int>(std::floor(-std::log2(top))) : 0;
  out.n_floor = out.n_min + kSelectionLevels;

  // Candidates in selection order: larger first, then leftmost.
  std::vector<std::pair<DyadicInterval, double>> order(avg.begin(), avg.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first.scale != b.first.scale) return a.first.scale > b.first.scale;
    return a.first.position < b.first.position;
  });
  std::vector<char> taken(S.size(), 0);
  auto claim = [&](const DyadicInterval& I, double a, std::vector<SelectedInterval>& level) {
    SelectedInterval sel{I, a, {}};
    for (std::size_t i = 0; i < S.size(); ++i)
      if (!taken[i] && contained_in(S[i].spatial, I)) {
        taken[i] = 1;
        sel.tiles.push_back(S[i]);
      }
    if (!sel.tiles.empty()) level.push_back(std::move(sel));
  };
  for (int n = out.n_min; n < out.n_floor; ++n) {
    const double lo = std::ldexp(1.0, -n - 1), hi = std::ldexp(1.0, -n);
    std::vector<SelectedInterval> level;
    for (const auto& [I, a] : order)
      if (a > lo && a <= hi) claim(I, a, level);
    if (!level.empty()) out.levels[n] = std::move(level);
  }
  // Floor bucket: what is left, under the maximal intervals of its own tiles.
  std::vector<SelectedInterval> floor;
  std::vector<std::pair<DyadicInterval, double>> rest;
  for (std::size_t i = 0; i < S.size(); ++i)
    if (!taken[i]) rest.emplace_back(S[i].spatial, avg.at(S[i].spatial));
  std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
    if (a.first.scale != b.first.scale) return a.first.scale > b.first.scale;
    return a.first.position < b.first.position;
  });
  for (const auto& [I, a] : rest) claim(I, a, floor);
  if (!floor.empty()) out.levels[out.n_floor] = std::move(floor);
  return out;
}

inline IntervalSelection select_intervals(const TileCollection& S, const SampledFunction& u, Weight w,
                                          double r_prime) {
  return select_intervals(S, u, selection_exponent(w, r_prime));
}

/// c with χ̃-average ≤ c⁻¹·2⁻¹·ℳu on I: the χ̃ mass ∫χ̃_I^{e/10} = |I|(1 + 2/(e−1))
/// times the factor 2 lost by the dyadic-window maximal function.
inline double superlevel_constant(double exponent) { return 0.5 / (1.0 + 2.0 / (exponent - 1.0)); }

struct SelectionCheck {
  bool exact_partition = false;
  bool disjoint_per_level = false;
  bool residual_averages = false;  // every dyadic J ⊆ I₀ holding a tile of S_n(I₀) has average ≤ 2^{-n}
  bool superlevel_containment = false;
  double worst_c = kInf;  // min over selected I and x ∈ I of ℳu(x)·2^n
};

/// Recomputes the selection's postconditions; the containment uses
/// {ℳu ≥ c·2^{-n}} with the module's maximal function, c = superlevel_constant by default.
inline SelectionCheck check_selection(const TileCollection& S, const IntervalSelection& sel, const SampledFunction& u,
                                      double exponent, std::optional<double> c = std::nullopt) {
  SelectionCheck chk;
  chk.disjoint_per_level = chk.residual_averages = chk.superlevel_containment = true;
  std::vector<TriTile> all;
  const SampledFunction Mu = maximal_function(u);
  const Grid& g = u.grid;
  for (const auto& [n, level] : sel.levels) {
    for (std::size_t i = 0; i < level.size(); ++i) {
      const auto& A = level[i];
      all.insert(all.end(), A.tiles.begin(), A.tiles.end());
      for (std::size_t j = i + 1; j < level.size(); ++j)
        chk.disjoint_per_level = chk.disjoint_per_level && disjoint(A.interval, level[j].interval);
      if (n == sel.n_floor) continue;
      const double cap = std::ldexp(1.0, -n) * (1 + 1e-12);
      for (const auto& t : A.tiles)
        for (DyadicInterval J = t.spatial; contained_in(J, A.interval); J = J.parent()) {
          chk.residual_averages = chk.residual_averages && chi_average(u, J.interval(), exponent) <= cap;
          if (J == A.interval) break;
        }
      const Interval I = A.interval.interval();
      for (std::size_t k = 0; k < g.n; ++k)
        if (I.contains(g.x(k))) chk.worst_c = std::min(chk.worst_c, std::ldexp(Mu[k].real(), n));
    }
  }
  chk.superlevel_containment = chk.worst_c >= c.value_or(superlevel_constant(exponent));
  chk.exact_partition = all.size() == S.size();
  if (chk.exact_partition) {
    auto key = [](const TriTile& a, const TriTile& b) { return selection_order(a, b); };
    std::vector<TriTile> want = S.tiles();
    std::sort(all.begin(), all.end(), key);
    std::sort(want.begin(), want.end(), key);
    chk.exact_partition = all == want;
  }
  return chk;
}

// ---------------------------------------------------------------- restricted triples

/// How h is built on H': phase-aligned with the model output of each square,
/// with uniform weights |Ω_active|^{-1/r'} or with the ℓ^r-dual extremal weights.
enum class HMode { uniform, extremal };

struct RestrictedTriple {
  GridSet F, G, H, Hprime;
  SampledFunction f, g;
  SequenceH h;
};

/// Empty if |f| ≤ 1_F, |g| ≤ 1_G and (Σ|h_ω|^{r'})^{1/r'} ≤ 1_{H'} at every sample, else the first violation.
inline std::string domination_violation(const RestrictedTriple& t, double r_prime) {
  constexpr double tol = 1e-12;
  const Grid& g = t.F.grid;
  const SampledFunction agg = t.h.aggregate(r_prime);
  for (std::size_t i = 0; i < g.n; ++i) {
    std::ostringstream why;
    if (std::abs(t.f[i]) > (t.F.contains(i) ? 1.0 : 0.0) + tol) why << "|f| > 1_F";
    else if (std::abs(t.g[i]) > (t.G.contains(i) ? 1.0 : 0.0) + tol) why << "|g| > 1_G";
    else if (!t.h.entries.empty() && agg[i].real() > (t.Hprime.contains(i) ? 1.0 : 0.0) + tol) why << "|h|_{l^r'} > 1_H'";
    else continue;
    why << " at x = " << g.x(i);
    return why.str();
  }
  if (!t.Hprime.subset_of(t.H)) return "H' is not a subset of H";
  return {};
}

inline SequenceH build_h(const TileCollection& S, const SampledFunction& f, const SampledFunction& g,
                         const GridSet& Hprime, double r, HMode mode) {
  const Grid& grid = f.grid;
  const double rp = conjugate(r);
  const auto pieces = model_pieces(f, g, S);
  SequenceH h(grid);
  double peak = 0;
  for (const auto& [w, p] : pieces) peak = std::max(peak, l2_norm(p));
  std::size_t active = 0;
  for (const auto& [w, p] : pieces)
    if (l2_norm(p) > 1e-12 * peak) ++active;
  std::vector<double> lr(grid.n, 0.0);
  if (mode == HMode::extremal)
    for (const auto& [w, p] : pieces)
      for (std::size_t i = 0; i < grid.n; ++i) lr[i] += std::pow(std::abs(p[i]), r);
  const double uniform = active ? std::pow(static_cast<double>(active), -1.0 / rp) : 0.0;
  for (const auto& [w, p] : pieces) {
    SampledFunction hw(grid);
    const bool on = l2_norm(p) > 1e-12 * peak;
    for (std::size_t i = 0; i < grid.n; ++i) {
      if (!Hprime.contains(i) || !on) continue;
      const double a = std::abs(p[i]);
      const cplx phase = a > 0 ? p[i] / a : cplx{1.0, 0.0};
      double weight = uniform;
      if (mode == HMode::extremal) weight = lr[i] > 0 ? std::pow(a, r - 1) / std::pow(lr[i], 1.0 / rp) : 0.0;
      hw.values[i] = weight * phase;
    }
    h.set(w, std::move(hw));
  }
  return h;
}

// ---------------------------------------------------------------- probe

struct ProbeSetup {
  GridSet F, G, H;
  SampledFunction f, g;
};

struct ProbeOptions {
  double C0 = 1.0;
  HMode hmode = HMode::uniform;
  bool timing = false;
  std::uint64_t seed = 0;  // recorded only
};

struct ProbeReport {
  ExponentTuple exponents;
  std::optional<std::array<double, 3>> nu;
  std::size_t squares = 0, tiles = 0;
  double F = 0, G = 0, H = 0, Hprime = 0, E = 0, C = 0;
  std::map<int, double> lambda_d;
  std::map<int, std::size_t> tiles_d;
  double lambda = 0;
  double ratio = 0;
  std::optional<double> nu_ratio;
  bool envelope_decreasing = true;  // |Λ_{S_d}| has a nonincreasing envelope in d
  std::uint64_t seed = 0;
  std::optional<double> wall_ms;
};

inline RestrictedTriple build_triple(const TileCollection& S, const ProbeSetup& setup, double r, const ProbeOptions& opt,
                                     ExceptionalSet* exc = nullptr) {
  if (setup.F.empty() || setup.G.empty() || setup.H.empty())
    throw std::invalid_argument("restricted_probe: F, G and H must have positive measure");
  const ExceptionalSet E = exceptional_set(setup.F, setup.G, opt.C0, true, setup.H.measure());
  RestrictedTriple t{setup.F, setup.G, setup.H, setup.H.minus(E.set), setup.f, setup.g, SequenceH(setup.f.grid)};
  t.h = build_h(S, t.f, t.g, t.Hprime, r, opt.hmode);
  if (exc) *exc = E;
  return t;
}

/// Measures |Λ_S| against |F|^{1/p}|G|^{1/q}|H|^{1/s'} on one restricted triple, stratum by stratum.
inline ProbeReport restricted_probe(const TileCollection& S, const ProbeSetup& setup, const ExponentTuple& ex,
                                    std::optional<std::array<double, 3>> nu = std::nullopt,
                                    const ProbeOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (nu && std::abs((*nu)[0] + (*nu)[1] + (*nu)[2] - 1) > 1e-12)
    throw std::invalid_argument("restricted_probe: nu must sum to 1");
  ExceptionalSet E;
  const RestrictedTriple t = build_triple(S, setup, ex.r, opt, &E);
  if (auto why = domination_violation(t, ex.r_prime()); !why.empty())
    throw std::invalid_argument("restricted_probe: " + why);
  if (!(t.Hprime.measure() > 0.5 * t.H.measure())) throw std::runtime_error("restricted_probe: H' is not a major subset");

  ProbeReport rep;
  rep.exponents = ex;
  rep.nu = nu;
  rep.squares = S.squares().size();
  rep.tiles = S.size();
  rep.F = t.F.measure();
  rep.G = t.G.measure();
  rep.H = t.H.measure();
  rep.Hprime = t.Hprime.measure();
  rep.E = E.set.measure();
  rep.C = E.C;
  rep.seed = opt.seed;
  FormData data(t.f, t.g, t.h, ex.r);
  cplx total{};
  for (const auto& [d, Sd] : stratify(S, E.set)) {
    const cplx v = trilinear_form(data, Sd);
    total += v;
    rep.lambda_d[d] = std::abs(v);
    rep.tiles_d[d] = Sd.size();
  }
  double envelope = kInf;
  for (const auto& [d, v] : rep.lambda_d) {
    if (v > envelope * (1 + 1e-9)) rep.envelope_decreasing = false;
    envelope = std::min(envelope, v);
  }
  rep.lambda = std::abs(total);
  const double denom = std::pow(rep.F, 1 / ex.p) * std::pow(rep.G, 1 / ex.q) * std::pow(rep.H, ex.inv_s_prime());
  rep.ratio = rep.lambda / denom;
  if (nu) rep.nu_ratio = rep.lambda / (std::pow(rep.F, (*nu)[0]) * std::pow(rep.G, (*nu)[1]) * std::pow(rep.H, (*nu)[2]));
  if (opt.timing)
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// ν₁, ν₂ on multiples of `step` in (0, 1/r'), ν₃ = 1 − ν₁ − ν₂ in (−1, 1/r').
inline std::vector<std::array<double, 3>> nu_grid(double r, double step = 0.05) {
  const double rp = conjugate(r);
  std::vector<std::array<double, 3>> out;
  const int K = static_cast<int>(std::ceil(1.0 / (rp * step)));
  for (int a = 1; a < K; ++a)
    for (int b = 1; b < K; ++b) {
      const double n1 = a * step, n2 = b * step, n3 = 1 - n1 - n2;
      if (n1 < 1 / rp && n2 < 1 / rp && n3 > -1 && n3 < 1 / rp) out.push_back({n1, n2, n3});
    }
  return out;
}

// ---------------------------------------------------------------- configurations

enum class StripOrientation { xi, eta };

/// N unit squares along 0 ≤ ξ < 1 ([0,1)×[k,k+1), orientation xi) or along 0 ≤ η < 1.
inline SquareCollection counterexample_config(std::size_t N, StripOrientation o, const Grid& grid) {
  if (N < 1) throw std::invalid_argument("counterexample_config: N must be at least 1");
  // The output band of the last square reaches N + 2, dilated by 11/10 around its centre.
  if (!grid.representable(-1.0, static_cast<double>(N) + 2.2))
    throw std::invalid_argument("counterexample_config: N exceeds the grid's Nyquist band");
  SquareCollection omega;
  for (std::size_t k = 0; k < N; ++k) {
    const auto kk = static_cast<std::int64_t>(k);
    omega.try_insert(o == StripOrientation::xi ? FrequencySquare(0, 0, kk) : FrequencySquare(0, kk, 0));
  }
  return omega;
}

/// Grid for the probes: N = 8192 samples on a period of 32 (Nyquist 128).
inline Grid probe_grid() { return Grid(8192, 32.0); }
inline constexpr double kProbeWindow = 8.0;  // tiles over [-8, 8)

inline SampledFunction modulated_indicator(const GridSet& A, double xi) {
  SampledFunction out = A.indicator();
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= std::polar(1.0, 2 * std::numbers::pi * xi * out.grid.x(i));
  return out;
}

/// The strip configuration's extremal data: the function along the strip is
/// a modulated indicator of an interval of length 1/N (spectrum spread over
/// all N squares), the other is a modulated unit indicator, H = [-1/2, 1/2).
inline ProbeSetup counterexample_setup(std::size_t N, StripOrientation o, const Grid& grid) {
  const double n = static_cast<double>(N);
  ProbeSetup s;
  const GridSet narrow = GridSet::from_intervals(grid, {{0.0, 1.0 / n}});
  const GridSet unit = GridSet::from_intervals(grid, {{-0.5, 0.5}});
  const SampledFunction spread = modulated_indicator(narrow, 0.5 * n), local = modulated_indicator(unit, 0.5);
  if (o == StripOrientation::xi) {
    s.F = unit;
    s.f = local;
    s.G = narrow;
    s.g = spread;
  } else {
    s.F = narrow;
    s.f = spread;
    s.G = unit;
    s.g = local;
  }
  s.H = unit;
  return s;
}

/// Random restricted data for a square family: F and G unions of 1-3 intervals
/// in the tile window, f and g modulated to the centres of Ω's projections;
/// H a unit interval.
inline ProbeSetup random_setup(const Grid& grid, const SquareCollection& omega, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-kProbeWindow / 2, kProbeWindow / 2), len(0.05, 1.5);
  std::uniform_int_distribution<int> count(1, 3);
  auto random_set = [&] {
    std::vector<Interval> parts;
    for (int k = count(rng); k > 0; --k) {
      const double a = pos(rng);
      parts.push_back({a, a + len(rng)});
    }
    return GridSet::from_intervals(grid, parts);
  };
  double lo1 = kInf, hi1 = -kInf, lo2 = kInf, hi2 = -kInf;
  for (const auto& w : omega) {
    lo1 = std::min(lo1, w.omega1.lo());
    hi1 = std::max(hi1, w.omega1.hi());
    lo2 = std::min(lo2, w.omega2.lo());
    hi2 = std::max(hi2, w.omega2.hi());
  }
  ProbeSetup s;
  s.F = random_set();
  s.G = random_set();
  const double h0 = pos(rng);
  s.H = GridSet::from_intervals(grid, {{h0, h0 + 1}});
  s.f = modulated_indicator(s.F, omega.empty() ? 0 : 0.5 * (lo1 + hi1));
  s.g = modulated_indicator(s.G, omega.empty() ? 0 : 0.5 * (lo2 + hi2));
  return s;
}

// ---------------------------------------------------------------- sweeps

struct SweepPoint {
  std::size_t squares = 0;
  std::size_t best_setup = 0;  // index of the setup attaining the ratio
  ProbeReport report;
};

/// For each size N, Ω_N = the first N squares of `nested` and the ratio is the
/// largest over `setups` (a finite stand-in for the supremum over restricted data).
inline std::vector<SweepPoint> probe_sweep(const std::vector<FrequencySquare>& nested,
                                           const std::vector<std::size_t>& sizes,
                                           const std::vector<ProbeSetup>& setups, const ExponentTuple& ex,
                                           const ProbeOptions& opt = {}) {
  if (setups.empty()) throw std::invalid_argument("probe_sweep: no setups");
  std::vector<SweepPoint> out;
  for (std::size_t N : sizes) {
    if (N > nested.size()) throw std::invalid_argument("probe_sweep: size exceeds the square family");
    const std::vector<FrequencySquare> part(nested.begin(), nested.begin() + static_cast<std::ptrdiff_t>(N));
    const TileCollection S = tiles_from_squares(SquareCollection(part), {-kProbeWindow, kProbeWindow});
    SweepPoint pt;
    pt.squares = N;
    for (std::size_t k = 0; k < setups.size(); ++k) {
      ProbeReport rep = restricted_probe(S, setups[k], ex, std::nullopt, opt);
      if (k == 0 || rep.ratio > pt.report.ratio) {
        pt.report = std::move(rep);
        pt.best_setup = k;
      }
    }
    out.push_back(std::move(pt));
  }
  return out;
}

/// Largest over smallest ratio across a sweep; +∞ if some ratio is zero.
inline double sweep_spread(const std::vector<SweepPoint>& pts) {
  double lo = kInf, hi = 0;
  for (const auto& p : pts) {
    lo = std::min(lo, p.report.ratio);
    hi = std::max(hi, p.report.ratio);
  }
  return lo > 0 ? hi / lo : kInf;
}

/// Ratios on the strip configuration for each N, with its matching extremal data.
inline std::vector<SweepPoint> counterexample_sweep(const std::vector<std::size_t>& Ns, StripOrientation o,
                                                    const ExponentTuple& ex, const Grid& grid,
                                                    const ProbeOptions& opt = {}) {
  std::vector<SweepPoint> out;
  for (std::size_t N : Ns) {
    const TileCollection S = tiles_from_squares(counterexample_config(N, o, grid), {-kProbeWindow, kProbeWindow});
    out.push_back({N, 0, restricted_probe(S, counterexample_setup(N, o, grid), ex, std::nullopt, opt)});
  }
  return out;
}

/// Whether the ratios never decrease along the sweep.
inline bool monotone_trend(const std::vector<SweepPoint>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].report.ratio < pts[i - 1].report.ratio) return false;
  return true;
}

// ---------------------------------------------------------------- persistence

inline nlohmann::ordered_json to_json(const ProbeReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "tfa-probe-report/1";
  j["exponents"] = {{"p", r.exponents.p}, {"q", r.exponents.q}, {"s", r.exponents.s}, {"r", r.exponents.r}};
  if (r.nu) j["nu"] = {(*r.nu)[0], (*r.nu)[1], (*r.nu)[2]};
  j["seed"] = r.seed;
  j["collection"] = {{"squares", r.squares}, {"tiles", r.tiles}};
  j["measures"] = {{"F", r.F}, {"G", r.G}, {"H", r.H}, {"H_prime", r.Hprime}, {"E", r.E}, {"C", r.C}};
  auto per_d = nlohmann::ordered_json::array();
  for (const auto& [d, v] : r.lambda_d) per_d.push_back({{"d", d}, {"tiles", r.tiles_d.at(d)}, {"lambda", v}});
  j["per_d"] = per_d;
  j["lambda"] = r.lambda;
  j["ratio"] = r.ratio;
  if (r.nu_ratio) j["nu_ratio"] = *r.nu_ratio;
  j["envelope_decreasing"] = r.envelope_decreasing;
  if (r.wall_ms) j["wall_ms"] = *r.wall_ms;
  return j;
}

inline const char* kProbeCsvHeader = "run,p,q,s,r,squares,tiles,F,G,H,H_prime,E,C,lambda,ratio,nu_ratio";

inline std::string csv_summary(const std::vector<std::pair<std::string, ProbeReport>>& runs) {
  std::ostringstream os;
  os << std::setprecision(10) << kProbeCsvHeader << '\n';
  for (const auto& [key, r] : runs) {
    os << key << ',' << r.exponents.p << ',' << r.exponents.q << ',' << r.exponents.s << ',' << r.exponents.r << ','
       << r.squares << ',' << r.tiles << ',' << r.F << ',' << r.G << ',' << r.H << ',' << r.Hprime << ',' << r.E
       << ',' << r.C << ',' << r.lambda << ',' << r.ratio << ',';
    if (r.nu_ratio) os << *r.nu_ratio;
    os << '\n';
  }
  return os.str();
}

}  // namespace tfa
