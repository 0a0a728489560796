#pragma once

#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "size_energy.hpp"

namespace tfa {

/// α = 1/2 − 1/r.
inline double alpha(double r) {
  if (!(r > 2)) throw std::invalid_argument("alpha: r must exceed 2");
  return 0.5 - 1.0 / r;
}

/// Which function a stopping time acts on.
enum class Side { f, g, h };

inline const char* side_name(Side s) { return s == Side::f ? "f" : s == Side::g ? "g" : "h"; }

/// Raised when a decomposition is called on a collection whose size exceeds
/// the cap; `tile` is the offending tile (the top of the extremal stack for h).
struct PreconditionError : std::invalid_argument {
  PreconditionError(const std::string& what, const TriTile& t) : std::invalid_argument(what), tile(t) {}
  TriTile tile;
};

struct Partition {
  Side side = Side::f;
  int n0 = 0;
  double energy = 0;  // the E the thresholds are relative to
  TileCollection residual;
  std::vector<Column> columns;
  std::vector<Row> rows;
  std::size_t work = 0;  // membership tests performed

  double column_measure() const {
    double m = 0;
    for (const auto& C : columns) m += C.top.spatial.length();
    return m;
  }
  double row_measure() const {
    double m = 0;
    for (const auto& R : rows) m += R.top.spatial.length();
    return m;
  }
  std::size_t extracted_tiles() const {
    std::size_t n = 0;
    for (const auto& C : columns) n += C.size();
    for (const auto& R : rows) n += R.size();
    return n;
  }
};

namespace detail {

inline double side_size(Side side, const TileCollection& S, FormData& data) {
  switch (side) {
    case Side::f: return size_f(S, data).value;
    case Side::g: return size_g(S, data).value;
    default: return size_h(S, data).value;
  }
}

inline void check_cap(Side side, const TileCollection& S, FormData& data, double cap, const char* who) {
  const SizeReport rep = side == Side::f ? size_f(S, data) : side == Side::g ? size_g(S, data) : size_h(S, data);
  if (rep.value > cap) {
    std::ostringstream os;
    os << who << ": size_" << side_name(side) << " = " << rep.value << " exceeds 2^{-n0}E = " << cap << " at tile "
       << *rep.witness;
    throw PreconditionError(os.str(), *rep.witness);
  }
}

}  // namespace detail

/// Largest n with size ≤ 2^{-n}·energy: the first admissible stopping-time level.
inline int start_level(double size, double energy) {
  int n = static_cast<int>(std::floor(std::log2(energy / size)));
  while (size > std::ldexp(energy, -n)) --n;
  while (size <= std::ldexp(energy, -n - 1)) ++n;
  return n;
}

/// Stopping time for f: repeatedly take the first tile (in
/// selection order) with |⟨f,φ_{s1}⟩|/|I_s|^{1/2} > 2^{-n0-1}E and remove its
/// maximal column. Requires size_f(S) ≤ 2^{-n0}E.
inline Partition decompose_f(const TileCollection& S, int n0, double E, FormData& data) {
  detail::check_cap(Side::f, S, data, std::ldexp(E, -n0), "decompose_f");
  Partition P{Side::f, n0, E, {}, {}, {}};
  const double tau = std::ldexp(E, -n0 - 1);
  std::vector<TriTile> pool(S.begin(), S.end());
  P.columns = greedy_stacks<Orientation::column>(
      pool, [&](const TriTile& t) { return data.size_term_f(t) > tau; }, [](const Column&) { return true; }, &P.work);
  P.residual = TileCollection(std::move(pool));
  return P;
}

/// Row analogue for g.
inline Partition decompose_g(const TileCollection& S, int n0, double E, FormData& data) {
  detail::check_cap(Side::g, S, data, std::ldexp(E, -n0), "decompose_g");
  Partition P{Side::g, n0, E, {}, {}, {}};
  const double tau = std::ldexp(E, -n0 - 1);
  std::vector<TriTile> pool(S.begin(), S.end());
  P.rows = greedy_stacks<Orientation::row>(
      pool, [&](const TriTile& t) { return data.size_term_g(t) > tau; }, [](const Row&) { return true; }, &P.work);
  P.residual = TileCollection(std::move(pool));
  return P;
}

/// Stopping time for h: maximal columns with h-value > 2^{-n0-1}E first,
/// then rows of the same kind from what is left. Removing tiles never raises
/// the h-value of a stack, so one pass in selection order finds every
/// column the restart-after-each-extraction formulation would.
inline Partition decompose_h(const TileCollection& S, int n0, double E, FormData& data) {
  detail::check_cap(Side::h, S, data, std::ldexp(E, -n0), "decompose_h");
  Partition P{Side::h, n0, E, {}, {}, {}};
  const double tau = std::ldexp(E, -n0 - 1);
  auto any = [](const TriTile&) { return true; };
  std::vector<TriTile> pool(S.begin(), S.end());
  P.columns = greedy_stacks<Orientation::column>(
      pool, any, [&](const Column& C) { return stack_h_value(C, data) > tau; }, &P.work);
  P.rows = greedy_stacks<Orientation::row>(
      pool, any, [&](const Row& R) { return stack_h_value(R, data) > tau; }, &P.work);
  P.residual = TileCollection(std::move(pool));
  return P;
}

inline Partition decompose(Side side, const TileCollection& S, int n0, double E, FormData& data) {
  switch (side) {
    case Side::f: return decompose_f(S, n0, E, data);
    case Side::g: return decompose_g(S, n0, E, data);
    default: return decompose_h(S, n0, E, data);
  }
}

/// Σ|I_T| / 2^{2n0} for f and g, Σ|I_T| / 2^{r'n0} for h (columns and rows separately, the max).
inline double top_measure_ratio(const Partition& P, double r_prime) {
  const double scale = P.side == Side::h ? std::pow(2.0, r_prime * P.n0) : std::ldexp(1.0, 2 * P.n0);
  return std::max(P.column_measure(), P.row_measure()) / scale;
}

// ---------------------------------------------------------------- checks

/// Sorted copy, for multiset comparisons.
inline std::vector<TriTile> sorted_tiles(std::vector<TriTile> v) {
  std::sort(v.begin(), v.end(), selection_order);
  return v;
}

struct PartitionCheck {
  bool exact_partition = false;
  bool disjoint_families = false;
  bool size_halved = false;
  bool work_bounded = false;
  double residual_size = 0;
  double measure_ratio = 0;

  bool combinatorial_ok() const { return exact_partition && disjoint_families && size_halved && work_bounded; }
};

/// Recomputes the postconditions of a decomposition from scratch.
inline PartitionCheck check_partition(const TileCollection& input, const Partition& P, FormData& data) {
  PartitionCheck c;
  std::vector<TriTile> all(P.residual.begin(), P.residual.end());
  for (const auto& C : P.columns) all.insert(all.end(), C.members.begin(), C.members.end());
  for (const auto& R : P.rows) all.insert(all.end(), R.members.begin(), R.members.end());
  c.exact_partition = sorted_tiles(all) == sorted_tiles(input.tiles());
  c.disjoint_families = mutually_disjoint(P.columns) && mutually_disjoint(P.rows);
  for (const auto& C : P.columns) c.disjoint_families = c.disjoint_families && C.valid();
  for (const auto& R : P.rows) c.disjoint_families = c.disjoint_families && R.valid();
  c.residual_size = detail::side_size(P.side, P.residual, data);
  c.size_halved = c.residual_size <= std::ldexp(P.energy, -P.n0 - 1);
  const double n = static_cast<double>(input.size());
  c.work_bounded = static_cast<double>(P.work) <= 2 * n * n;
  c.measure_ratio = top_measure_ratio(P, data.r_prime());
  return c;
}

// ---------------------------------------------------------------- splitting

struct SplitLevel {
  int n = 0;
  std::vector<int> h_levels;  // n0 values at which the h stopping time ran
  std::vector<Column> f_columns, h_columns;
  std::vector<Row> g_rows, h_rows;

  std::vector<Column> columns() const {
    std::vector<Column> out = f_columns;
    out.insert(out.end(), h_columns.begin(), h_columns.end());
    return out;
  }
  std::vector<Row> rows() const {
    std::vector<Row> out = g_rows;
    out.insert(out.end(), h_rows.begin(), h_rows.end());
    return out;
  }
  bool empty() const { return f_columns.empty() && h_columns.empty() && g_rows.empty() && h_rows.empty(); }

  template <class Family>
  static TileCollection union_of(const Family& family) {
    std::vector<TriTile> out;
    for (const auto& T : family) out.insert(out.end(), T.members.begin(), T.members.end());
    return TileCollection(std::move(out));
  }
  TileCollection column_tiles() const { return union_of(columns()); }
  TileCollection row_tiles() const { return union_of(rows()); }
};

/// Number of split levels run before the leftover tiles go to the remainder.
inline constexpr int kSplitLevels = kEnergyLevels;

struct Splitting {
  double r = 4;
  std::array<double, 3> sizes{}, energies{};  // S_j, E_j for f, g, h
  int n_start = 0;
  std::map<int, SplitLevel> levels;
  /// Tiles left after kSplitLevels levels, grouped into maximal columns; all
  /// three of their size terms are below the last level's caps.
  std::vector<Column> remainder;
  std::size_t work = 0;

  double r_prime() const { return conjugate(r); }
};

namespace detail {

inline int ceil_ratio(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

}  // namespace detail

/// The h stopping-time levels grouped under split level n: ⌈2n/r'⌉ … ⌈2(n+1)/r'⌉−1.
/// After them the h size is at most 2^{-⌈2(n+1)/r'⌉}E₃ ≤ 2^{-2(n+1)/r'}E₃.
inline std::vector<int> h_levels_for(int n, double r_prime) {
  std::vector<int> out;
  for (int m = detail::ceil_ratio(2.0 * n / r_prime); m < detail::ceil_ratio(2.0 * (n + 1) / r_prime); ++m)
    out.push_back(m);
  return out;
}

/// Runs the f, g and h stopping times level by level, starting at the
/// largest n at which all three size caps already hold.
inline Splitting split(const TileCollection& S, FormData& data) {
  Splitting out;
  out.r = data.r();
  alpha(out.r);
  const double rp = out.r_prime();
  if (S.empty()) return out;
  out.sizes = {size_f(S, data).value, size_g(S, data).value, size_h(S, data).value};
  out.energies = {energy_f(S, data).value, energy_g(S, data).value, energy_h(S, data).value};
  const auto& [S1, S2, S3] = out.sizes;
  const auto& [E1, E2, E3] = out.energies;

  auto caps_hold = [&](int n) {
    return S1 <= std::ldexp(E1, -n) && S2 <= std::ldexp(E2, -n) &&
           S3 <= std::ldexp(E3, -detail::ceil_ratio(2.0 * n / rp));
  };
  int n = 0;
  if (S1 > 0 || S2 > 0 || S3 > 0) {
    // Every nonzero size eventually violates its cap, so the largest admissible n exists.
    n = std::numeric_limits<int>::max();
    if (S1 > 0) n = std::min(n, static_cast<int>(std::floor(std::log2(E1 / S1))));
    if (S2 > 0) n = std::min(n, static_cast<int>(std::floor(std::log2(E2 / S2))));
    if (S3 > 0) n = std::min(n, static_cast<int>(std::floor(std::log2(E3 / S3) * rp / 2)));
    while (!caps_hold(n)) --n;
    while (caps_hold(n + 1)) ++n;
  }
  out.n_start = n;

  TileCollection working = S;
  for (int level = 0; level < kSplitLevels && !working.empty(); ++level, ++n) {
    SplitLevel L;
    L.n = n;
    Partition pf = decompose_f(working, n, E1, data);
    Partition pg = decompose_g(pf.residual, n, E2, data);
    working = pg.residual;
    out.work += pf.work + pg.work;
    L.f_columns = std::move(pf.columns);
    L.g_rows = std::move(pg.rows);
    for (int m : h_levels_for(n, rp)) {
      Partition ph = decompose_h(working, m, E3, data);
      working = ph.residual;
      out.work += ph.work;
      L.h_levels.push_back(m);
      for (auto& C : ph.columns) L.h_columns.push_back(std::move(C));
      for (auto& R : ph.rows) L.h_rows.push_back(std::move(R));
    }
    if (!L.empty()) out.levels.emplace(n, std::move(L));
  }
  std::vector<TriTile> pool(working.begin(), working.end());
  out.remainder = greedy_stacks<Orientation::column>(
      pool, [](const TriTile&) { return true; }, [](const Column&) { return true; }, &out.work);
  return out;
}

struct SplittingCheck {
  bool exact_partition = false;
  bool disjoint_families = false;  // per stopping-time family and level
  bool caps_hold = false;          // the per-level size caps
  double measure_ratio = 0;        // max_n Σ|I_T| / 2^{2n} over columns and over rows

  bool combinatorial_ok() const { return exact_partition && disjoint_families && caps_hold; }
};

inline SplittingCheck check_splitting(const TileCollection& input, const Splitting& sp, FormData& data) {
  SplittingCheck c;
  c.disjoint_families = c.caps_hold = true;
  const double rp = sp.r_prime();
  const auto& [S1, S2, S3] = sp.sizes;
  const auto& [E1, E2, E3] = sp.energies;
  std::vector<TriTile> all;
  auto collect = [&](const auto& family) {
    for (const auto& T : family) {
      all.insert(all.end(), T.members.begin(), T.members.end());
      c.disjoint_families = c.disjoint_families && T.valid();
    }
    c.disjoint_families = c.disjoint_families && mutually_disjoint(family);
  };
  for (const auto& [n, L] : sp.levels) {
    collect(L.f_columns);
    collect(L.h_columns);
    collect(L.g_rows);
    collect(L.h_rows);
    const double cf = std::min(std::ldexp(E1, -n), S1), cg = std::min(std::ldexp(E2, -n), S2);
    const double ch = std::min(std::pow(2.0, -2.0 * n / rp) * E3, S3) * (1 + 1e-12);
    for (const TileCollection& T : {L.column_tiles(), L.row_tiles()}) {
      if (T.empty()) continue;
      c.caps_hold = c.caps_hold && size_f(T, data).value <= cf && size_g(T, data).value <= cg &&
                    size_h(T, data).value <= ch;
    }
    double mc = 0, mr = 0;
    for (const auto& C : L.columns()) mc += C.top.spatial.length();
    for (const auto& R : L.rows()) mr += R.top.spatial.length();
    c.measure_ratio = std::max(c.measure_ratio, std::max(mc, mr) / std::ldexp(1.0, 2 * n));
  }
  collect(sp.remainder);
  c.exact_partition = sorted_tiles(all) == sorted_tiles(input.tiles());
  return c;
}

// ---------------------------------------------------------------- reports

namespace detail {

template <class Family>
void report_family(std::ostream& os, const char* kind, const Family& family) {
  for (const auto& T : family)
    os << kind << " top=" << T.top << " members=" << T.size() << " measure=" << T.top.spatial.length() << '\n';
}

}  // namespace detail

/// One line per extracted column/row: top tile, member count, top measure.
inline std::string report(const Partition& P) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "partition side=" << side_name(P.side) << " n0=" << P.n0 << " extracted=" << P.extracted_tiles()
     << " residual=" << P.residual.size() << " columns=" << P.columns.size() << " rows=" << P.rows.size() << '\n';
  detail::report_family(os, "column", P.columns);
  detail::report_family(os, "row", P.rows);
  return os.str();
}

inline std::string report(const Splitting& sp) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "splitting r=" << sp.r << " n_start=" << sp.n_start << " levels=" << sp.levels.size()
     << " remainder=" << sp.remainder.size() << '\n';
  for (const auto& [n, L] : sp.levels) {
    os << "level n=" << n << " h_levels=";
    for (std::size_t i = 0; i < L.h_levels.size(); ++i) os << (i ? "," : "") << L.h_levels[i];
    os << " f_columns=" << L.f_columns.size() << " g_rows=" << L.g_rows.size() << " h_columns=" << L.h_columns.size()
       << " h_rows=" << L.h_rows.size() << '\n';
    detail::report_family(os, "f_column", L.f_columns);
    detail::report_family(os, "g_row", L.g_rows);
    detail::report_family(os, "h_column", L.h_columns);
    detail::report_family(os, "h_row", L.h_rows);
  }
  detail::report_family(os, "remainder_column", sp.remainder);
  return os.str();
}

// ---------------------------------------------------------------- generic estimate

struct GenericBoundInputs {
  std::array<double, 3> sizes{}, energies{};
  std::array<double, 3> theta{1.0 / 3, 1.0 / 3, 1.0 / 3}, beta{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double avg_F = 1, avg_G = 1;  // sup_s |I_s|^{-1} ∫ 1_F χ̃_{I_s}^{100}, same for G
};

/// Empty when θ, β are admissible weights for exponent r, else the reason.
inline std::string weight_violation(const std::array<double, 3>& th, const std::array<double, 3>& be, double r) {
  const double a = alpha(r), cap = std::min(1.0, 1.0 / (4 * a)), eps = 1e-12;
  std::ostringstream why;
  if (std::abs(th[0] + th[1] + th[2] - 1) > eps) why << "theta does not sum to 1; ";
  if (std::abs(be[0] + be[1] + be[2] - 1) > eps) why << "beta does not sum to 1; ";
  if (th[0] < 0 || th[0] > cap + eps || be[1] < 0 || be[1] > cap + eps) why << "theta1/beta2 outside [0, min(1, 1/4a)]; ";
  if (th[1] < 0 || th[1] > 0.5 + eps || be[0] < 0 || be[0] > 0.5 + eps) why << "theta2/beta1 outside [0, 1/2]; ";
  if (!(th[2] > 0) || th[2] > 1 + eps || !(be[2] > 0) || be[2] > 1 + eps) why << "theta3/beta3 outside (0, 1]; ";
  return why.str();
}

/// Exponents of (S₁,E₁,S₂,E₂,S₃,E₃) in the two terms, written through
/// r alone: 4α = 2(r−2)/r and (r'/2)·4α = (r−2)/(r−1). Instantiable with an
/// exact rational type.
template <class T>
std::array<std::array<T, 6>, 2> generic_exponents(T r, const std::array<T, 3>& th, const std::array<T, 3>& be) {
  const T one(1), two(2);
  const T four_a = two * (r - two) / r;
  const T two_a = (r - two) / r;
  const T h_rate = (r - two) / (r - one);
  return {{{four_a * th[0], one - four_a * th[0], four_a * th[1], two_a - four_a * th[1], h_rate * th[2],
            one - h_rate * th[2]},
           {four_a * be[0], two_a - four_a * be[0], four_a * be[1], one - four_a * be[1], h_rate * be[2],
            one - h_rate * be[2]}}};
}

/// 1 + 2α + 2/r' − 2 − 4α; zero for every r.
template <class T>
T exponent_identity_defect(T r) {
  const T one(1), two(2);
  const T a = one / two - one / r;
  const T rp = r / (r - one);
  return one + two * a + two / rp - two - T(4) * a;
}

/// The two-term size/energy bound for |Λ_S|.
inline double generic_bound(const GenericBoundInputs& in, double r) {
  if (auto why = weight_violation(in.theta, in.beta, r); !why.empty()) throw std::invalid_argument("generic_bound: " + why);
  for (int j = 0; j < 3; ++j)
    if (!(in.sizes[j] >= 0) || !(in.energies[j] >= 0))
      throw std::invalid_argument("generic_bound: sizes and energies must be nonnegative");
  const double a = alpha(r), rp = conjugate(r);
  const auto& [S1, S2, S3] = in.sizes;
  const auto& [E1, E2, E3] = in.energies;
  auto term = [&](const std::array<double, 3>& w, bool first) {
    const double x1 = 4 * a * w[0], x2 = 4 * a * w[1], x3 = rp / 2 * 4 * a * w[2];
    const double e1 = first ? 1 - x1 : 2 * a - x1;
    const double e2 = first ? 2 * a - x2 : 1 - x2;
    return std::pow(first ? in.avg_G : in.avg_F, 1 / r) * std::pow(S1, x1) * std::pow(E1, e1) * std::pow(S2, x2) *
           std::pow(E2, e2) * std::pow(S3, x3) * std::pow(E3, 1 - x3);
  };
  return term(in.theta, true) + term(in.beta, false);
}

/// sup_s |I_s|^{-1} ∫ u χ̃_{I_s}^{100} for a nonnegative u (typically an indicator).
inline double sup_average(const TileCollection& S, const SampledFunction& u) {
  double best = 0;
  std::map<DyadicInterval, bool> seen;
  for (const auto& s : S) {
    if (!seen.emplace(s.spatial, true).second) continue;
    const Interval I = s.spatial.interval();
    const SampledFunction chi = chi_tilde_on(u.grid, I, 100 * kChiExponent);
    double acc = 0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::abs(u[i]) * chi[i].real();
    best = std::max(best, acc * u.grid.spacing() / I.length());
  }
  return best;
}

/// Inputs for generic_bound measured on S: sizes and (greedy) energies from
/// the data, set averages from the indicators of F and G.
inline GenericBoundInputs measure_generic_inputs(const TileCollection& S, FormData& data, const SampledFunction& F,
                                                 const SampledFunction& G) {
  GenericBoundInputs in;
  in.sizes = {size_f(S, data).value, size_g(S, data).value, size_h(S, data).value};
  in.energies = {energy_f(S, data).value, energy_g(S, data).value, energy_h(S, data).value};
  in.avg_F = sup_average(S, F);
  in.avg_G = sup_average(S, G);
  return in;
}

}  // namespace tfa
