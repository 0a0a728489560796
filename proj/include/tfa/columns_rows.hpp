#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "operators.hpp"

namespace tfa {

/// A column fixes the first frequency component of its top (ω_{t₁} ⊆ ω_{s₁});
/// a row fixes the second.
enum class Orientation { column, row };

template <Orientation O>
struct Stack {
  static constexpr int lead = O == Orientation::column ? 1 : 2;   // shared component
  static constexpr int cross = O == Orientation::column ? 2 : 1;  // disjoint component

  TriTile top;
  std::vector<TriTile> members;

  Stack() = default;
  /// Throws unless the members satisfy the containment and disjointness invariants.
  Stack(const TriTile& t, std::vector<TriTile> m) : top(t), members(std::move(m)) {
    if (auto why = violation(top, members); !why.empty()) throw std::invalid_argument(why);
  }

  /// Skips the invariant check; for callers that build members with admits()
  /// from a collection over pairwise disjoint squares, where it holds by construction.
  static Stack unchecked(const TriTile& t, std::vector<TriTile> m) {
    Stack out;
    out.top = t;
    out.members = std::move(m);
    return out;
  }

  static bool admits(const TriTile& t, const TriTile& s) {
    return contained_in(s.spatial, t.spatial) && contained_in(component(t, lead), component(s, lead));
  }

  /// Empty when (t, members) is a valid stack, otherwise the reason. The
  /// cross intervals of tiles sharing one square coincide; disjointness is
  /// required between distinct squares only.
  static std::string violation(const TriTile& t, const std::vector<TriTile>& members) {
    std::ostringstream why;
    for (const auto& s : members)
      if (!admits(t, s)) {
        why << (O == Orientation::column ? "column" : "row") << ": tile " << s << " not under top " << t;
        return why.str();
      }
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const auto &a = members[i], &b = members[j];
        if (a.square == b.square) continue;
        if (!disjoint(component(a, cross), component(b, cross))) {
          why << (O == Orientation::column ? "column" : "row") << ": tiles " << a << " and " << b
              << " overlap in frequency component " << cross;
          return why.str();
        }
      }
    return {};
  }

  bool valid() const { return violation(top, members).empty(); }
  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
  TileCollection tiles() const { return TileCollection(members); }

  /// I_T × ω_{T,lead}, the rectangle used for mutual disjointness.
  std::pair<DyadicInterval, DyadicInterval> top_rectangle() const { return {top.spatial, component(top, lead)}; }

  /// Ω(T) in first-appearance order.
  std::vector<FrequencySquare> squares() const { return tiles().squares(); }

  static const DyadicInterval& component(const TriTile& t, int j) { return j == 1 ? t.square.omega1 : t.square.omega2; }
};

using Column = Stack<Orientation::column>;
using Row = Stack<Orientation::row>;

template <Orientation O>
Stack<O> maximal_stack(const TileCollection& S, const TriTile& top) {
  std::vector<TriTile> members;
  for (const auto& s : S)
    if (Stack<O>::admits(top, s)) members.push_back(s);
  return Stack<O>::unchecked(top, std::move(members));
}

/// All s ∈ S with I_s ⊆ I_top and ω_{top,1} ⊆ ω_{s₁}.
inline Column maximal_column(const TileCollection& S, const TriTile& top) {
  return maximal_stack<Orientation::column>(S, top);
}
/// All s ∈ S with I_s ⊆ I_top and ω_{top,2} ⊆ ω_{s₂}.
inline Row maximal_row(const TileCollection& S, const TriTile& top) { return maximal_stack<Orientation::row>(S, top); }

/// Pairwise disjoint member sets and pairwise disjoint top rectangles.
template <Orientation O>
bool mutually_disjoint(const std::vector<Stack<O>>& family) {
  std::set<TriTile, decltype(&selection_order)> seen(&selection_order);
  for (const auto& T : family)
    for (const auto& s : T.members)
      if (!seen.insert(s).second) return false;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const auto [Ii, wi] = family[i].top_rectangle();
      const auto [Ij, wj] = family[j].top_rectangle();
      if (!disjoint(Ii, Ij) && !disjoint(wi, wj)) return false;
    }
  return true;
}

struct EstimateSides {
  double lhs = 0, rhs = 0;
  double ratio() const { return rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0); }
};

/// (|I_t|^{-1} ∫ Σ_{ω∈Ω(T)} |ℳ(h_ω χ̃_{I_t}^M)|^{r'} 1_{I_t})^{1/r'}
template <Orientation O>
double h_factor(const Stack<O>& T, FormData& data) {
  double acc = 0;
  for (const auto& w : T.squares()) acc += data.h_local(T.top.spatial, w);
  return std::pow(acc / T.top.spatial.length(), 1.0 / data.r_prime());
}

namespace detail {

// sup_s |⟨u,φ_s⟩|/|I_s|^{1/2} and Σ_s |⟨u,φ_s⟩|² for the f (j=1) or g (j=2) side.
template <Orientation O>
std::pair<double, double> pairing_stats(const Stack<O>& T, FormData& data, int j) {
  double sup = 0, energy = 0;
  for (const auto& s : T.members) {
    const cplx p = j == 1 ? data.pair_f(s) : data.pair_g(s);
    sup = std::max(sup, std::abs(p) / std::sqrt(s.spatial.length()));
    energy += std::norm(p);
  }
  return {sup, energy};
}

// One of the two estimates: the `lead` side enters through its sup only, the
// cross side through sup^{(r-2)/r}·(ℓ² mass/|I_t|)^{1/r}.
template <Orientation O>
EstimateSides stack_estimate(const Stack<O>& T, FormData& data) {
  if (T.empty()) return {};
  const double r = data.r(), It = T.top.spatial.length();
  const auto [lead_sup, lead_energy] = pairing_stats(T, data, Stack<O>::lead);
  const auto [cross_sup, cross_energy] = pairing_stats(T, data, Stack<O>::cross);
  (void)lead_energy;
  EstimateSides out;
  out.lhs = std::abs(trilinear_form(data, T.tiles()));
  out.rhs = lead_sup * std::pow(cross_sup, (r - 2) / r) * std::pow(cross_energy / It, 1 / r) * h_factor(T, data) * It;
  return out;
}

}  // namespace detail

/// |Λ_C| against sup_f · sup_g^{(r-2)/r} · (|I_t|^{-1}Σ|⟨g,φ_{s₂}⟩|²)^{1/r} · (h factor) · |I_t|.
inline EstimateSides column_estimate_sides(const Column& C, FormData& data) { return detail::stack_estimate(C, data); }
/// Mirror image with f and g exchanged.
inline EstimateSides row_estimate_sides(const Row& R, FormData& data) { return detail::stack_estimate(R, data); }

inline EstimateSides column_estimate_sides(const Column& C, const SampledFunction& f, const SampledFunction& g,
                                           const SequenceH& h, double r = 4.0) {
  FormData data(f, g, h, r);
  return column_estimate_sides(C, data);
}
inline EstimateSides row_estimate_sides(const Row& R, const SampledFunction& f, const SampledFunction& g,
                                        const SequenceH& h, double r = 4.0) {
  FormData data(f, g, h, r);
  return row_estimate_sides(R, data);
}

/// |I_C|^{-1} Σ_s |⟨g,φ_{s₂}⟩|² against |I_C|^{-1} ∫ |g|² χ̃_{I_C}^{10}.
inline EstimateSides column_g_orthogonality(const Column& C, const SampledFunction& g) {
  const Grid& grid = g.grid;
  const Interval I = C.top.spatial.interval();
  const Spectrum gs = fourier(g);
  EstimateSides out;
  for (const auto& s : C.members) out.lhs += std::norm(WavePacket(grid, s, 2).pair_with(gs));
  out.lhs /= I.length();
  const SampledFunction chi = chi_tilde_on(grid, I, kChiExponent);
  for (std::size_t i = 0; i < grid.n; ++i) out.rhs += std::norm(g[i]) * chi[i].real();
  out.rhs *= grid.spacing() / I.length();
  return out;
}

}  // namespace tfa
