#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "columns_rows.hpp"

namespace tfa {

/// Number of dyadic levels scanned below a size: contributions under
/// size/2^20 are below every tolerance used downstream.
inline constexpr int kEnergyLevels = 21;

struct SizeReport {
  double value = 0;
  std::optional<TriTile> witness;  // tile (f, g) or top of the extremal column/row (h)
  std::optional<Orientation> orientation;
};

struct EnergyReport {
  double value = 0;
  int n = 0;
  std::vector<Column> columns;
  std::vector<Row> rows;

  double top_measure() const {
    double m = 0;
    for (const auto& C : columns) m += C.top.spatial.length();
    for (const auto& R : rows) m += R.top.spatial.length();
    return m;
  }
};

/// Tie-breaking for stacks: larger I first, then leftmost I, leftmost lead
/// component, leftmost cross component.
template <Orientation O>
bool stack_order(const TriTile& a, const TriTile& b) {
  if constexpr (O == Orientation::column) {
    return selection_order(a, b);
  } else {
    return selection_order(a.reflected(), b.reflected());
  }
}

/// |⟨f,φ_{s1}⟩|/|I_s|^{1/2} (j = 1) or the g analogue (j = 2).
inline double size_term(FormData& data, const TriTile& s, int j) {
  return j == 1 ? data.size_term_f(s) : data.size_term_g(s);
}

/// (|I_T|^{-1} Σ_{ω∈Ω(T)} ∫_{I_T} |ℳ(h_ω χ̃_{I_T}^M)|^{r'})^{1/r'}; the h-size of one stack.
template <Orientation O>
double stack_h_value(const Stack<O>& T, FormData& data) {
  if (T.empty()) return 0.0;
  return h_factor(T, data);
}

/// Scans `pool` once in stack order. Every unassigned tile passing
/// `may_top` spawns the maximal stack over the unassigned tiles; if
/// `accept` agrees, the stack is recorded and its members removed. Returns
/// the stacks; `pool` keeps the unassigned tiles in their original order.
/// `work`, if given, is incremented once per membership test.
template <Orientation O, class MayTop, class Accept>
std::vector<Stack<O>> greedy_stacks(std::vector<TriTile>& pool, MayTop&& may_top, Accept&& accept,
                                    std::size_t* work = nullptr) {
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return stack_order<O>(pool[a], pool[b]); });
  std::vector<char> taken(pool.size(), 0);
  std::vector<Stack<O>> out;
  for (std::size_t idx : order) {
    if (taken[idx] || !may_top(pool[idx])) continue;
    const TriTile t = pool[idx];
    std::vector<TriTile> members;
    std::vector<std::size_t> member_idx;
    if (work) *work += pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (!taken[i] && Stack<O>::admits(t, pool[i])) {
        members.push_back(pool[i]);
        member_idx.push_back(i);
      }
    Stack<O> candidate = Stack<O>::unchecked(t, std::move(members));
    if (!accept(candidate)) continue;
    for (std::size_t i : member_idx) taken[i] = 1;
    out.push_back(std::move(candidate));
  }
  std::vector<TriTile> rest;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (!taken[i]) rest.push_back(pool[i]);
  pool = std::move(rest);
  return out;
}

// ---------------------------------------------------------------- sizes

inline SizeReport size_pairing(const TileCollection& S, FormData& data, int j) {
  SizeReport rep;
  for (const auto& s : S) {
    const double v = size_term(data, s, j);
    if (!rep.witness || v > rep.value) {
      rep.value = v;
      rep.witness = s;
    }
  }
  return rep;
}

/// sup_s |⟨f,φ_{s1}⟩|/|I_s|^{1/2}
inline SizeReport size_f(const TileCollection& S, FormData& data) { return size_pairing(S, data, 1); }
/// sup_s |⟨g,φ_{s2}⟩|/|I_s|^{1/2}
inline SizeReport size_g(const TileCollection& S, FormData& data) { return size_pairing(S, data, 2); }

/// Sup of the stack h-value over maximal columns and rows with tops in S.
/// Adding tiles to a stack with a fixed top only adds terms, so the
/// maximal stack is extremal for its top.
inline SizeReport size_h(const TileCollection& S, FormData& data) {
  SizeReport rep;
  for (const auto& t : S) {
    const double c = stack_h_value(maximal_column(S, t), data);
    if (!rep.witness || c > rep.value) rep = {c, t, Orientation::column};
    const double r = stack_h_value(maximal_row(S, t), data);
    if (r > rep.value) rep = {r, t, Orientation::row};
  }
  return rep;
}

// ---------------------------------------------------------------- energies

namespace detail {

inline std::vector<int> level_grid(double size) {
  std::vector<int> levels;
  if (!(size > 0)) return levels;
  const int top = static_cast<int>(std::floor(std::log2(size)));
  for (int n = top; n > top - kEnergyLevels; --n) levels.push_back(n);
  return levels;
}

template <Orientation O>
EnergyReport pairing_energy(const TileCollection& S, FormData& data) {
  constexpr int j = Stack<O>::lead;
  EnergyReport best;
  const double size = size_pairing(S, data, j).value;
  for (int n : level_grid(size)) {
    const double lo = std::ldexp(1.0, n), hi = std::ldexp(1.0, n + 1);
    std::vector<TriTile> pool;
    for (const auto& s : S)
      if (size_term(data, s, j) <= hi) pool.push_back(s);
    auto family = greedy_stacks<O>(
        pool, [&](const TriTile& t) { return size_term(data, t, j) >= lo; }, [](const Stack<O>&) { return true; });
    double measure = 0;
    for (const auto& T : family) measure += T.top.spatial.length();
    const double value = lo * std::sqrt(measure);
    if (value > best.value) {
      best = EnergyReport{};
      best.value = value;
      best.n = n;
      if constexpr (O == Orientation::column) best.columns = std::move(family);
      else best.rows = std::move(family);
    }
  }
  return best;
}

}  // namespace detail

/// Greedy lower bound for sup_n 2^n (Σ_C |I_C|)^{1/2} over admissible column families.
inline EnergyReport energy_f(const TileCollection& S, FormData& data) {
  return detail::pairing_energy<Orientation::column>(S, data);
}
/// Row analogue for g.
inline EnergyReport energy_g(const TileCollection& S, FormData& data) {
  return detail::pairing_energy<Orientation::row>(S, data);
}

/// Greedy lower bound for sup_n 2^n (Σ_T |I_T|)^{1/r'}: disjoint columns
/// with h-value ≥ 2^n first, then disjoint rows from the remaining tiles.
inline EnergyReport energy_h(const TileCollection& S, FormData& data) {
  EnergyReport best;
  const double size = size_h(S, data).value;
  for (int n : detail::level_grid(size)) {
    const double lo = std::ldexp(1.0, n);
    std::vector<TriTile> pool(S.begin(), S.end());
    auto cols = greedy_stacks<Orientation::column>(
        pool, [](const TriTile&) { return true; }, [&](const Column& C) { return stack_h_value(C, data) >= lo; });
    auto rows = greedy_stacks<Orientation::row>(
        pool, [](const TriTile&) { return true; }, [&](const Row& R) { return stack_h_value(R, data) >= lo; });
    EnergyReport rep;
    rep.n = n;
    rep.columns = std::move(cols);
    rep.rows = std::move(rows);
    rep.value = lo * std::pow(rep.top_measure(), 1.0 / data.r_prime());
    if (rep.value > best.value) best = std::move(rep);
  }
  return best;
}

/// Independent check of the defining thresholds of an energy witness.
inline bool energy_witness_admissible_f(const EnergyReport& rep, FormData& data, int j = 1) {
  const double lo = std::ldexp(1.0, rep.n), hi = std::ldexp(1.0, rep.n + 1);
  auto check = [&](const auto& family) {
    if (!mutually_disjoint(family)) return false;
    for (const auto& T : family) {
      if (size_term(data, T.top, j) < lo) return false;
      for (const auto& s : T.members)
        if (size_term(data, s, j) > hi) return false;
      if (!T.valid()) return false;
    }
    return true;
  };
  return j == 1 ? check(rep.columns) && rep.rows.empty() : check(rep.rows) && rep.columns.empty();
}

inline bool energy_witness_admissible_h(const EnergyReport& rep, FormData& data) {
  const double lo = std::ldexp(1.0, rep.n);
  if (!mutually_disjoint(rep.columns) || !mutually_disjoint(rep.rows)) return false;
  for (const auto& C : rep.columns)
    if (!C.valid() || stack_h_value(C, data) < lo) return false;
  for (const auto& R : rep.rows)
    if (!R.valid() || stack_h_value(R, data) < lo) return false;
  return true;
}

// ---------------------------------------------------------------- majorants

/// sup_s |I_s|^{-1} ∫ |f| χ̃_{I_s}^M.
inline double size_upper_bound_f(const TileCollection& S, const SampledFunction& f) {
  double best = 0;
  for (const auto& s : S) {
    const Interval I = s.spatial.interval();
    const SampledFunction chi = chi_tilde_on(f.grid, I, kChiExponent * kChiPower);
    double acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += std::abs(f[i]) * chi[i].real();
    best = std::max(best, acc * f.grid.spacing() / I.length());
  }
  return best;
}

/// sup_t (|I_t|^{-1} ∫ ((Σ_ω|h_ω|^{r'})^{1/r'} χ̃_{I_t}^M)^{r'})^{1/r'}.
inline double size_upper_bound_h(const TileCollection& S, const SequenceH& h, double r_prime) {
  const SampledFunction agg = h.aggregate(r_prime);
  double best = 0;
  for (const auto& t : S) {
    const Interval I = t.spatial.interval();
    const SampledFunction chi = chi_tilde_on(h.grid, I, kChiExponent * kChiPower);
    double acc = 0;
    for (std::size_t i = 0; i < agg.size(); ++i) acc += std::pow(agg[i].real() * chi[i].real(), r_prime);
    best = std::max(best, std::pow(acc * h.grid.spacing() / I.length(), 1.0 / r_prime));
  }
  return best;
}

/// ‖f χ̃_{I₀}‖₂, the localized energy majorant for f and g.
inline double localized_l2(const SampledFunction& f, const Interval& I0) {
  const SampledFunction chi = chi_tilde_on(f.grid, I0, kChiExponent);
  return l2_norm(pointwise_product(f, chi));
}

/// ‖(Σ_ω|h_ω|^{r'})^{1/r'} χ̃_{I₀}^M‖_{r'}, the localized energy majorant for h.
inline double localized_h_norm(const SequenceH& h, const Interval& I0, double r_prime) {
  const SampledFunction chi = chi_tilde_on(h.grid, I0, kChiExponent * kChiPower);
  return lp_norm(pointwise_product(h.aggregate(r_prime), chi), r_prime);
}

}  // namespace tfa
