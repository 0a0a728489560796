#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "analysis.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace tfa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Conjugate exponent t/(t-1), with 1 ↔ ∞.
inline double conjugate(double t) {
  if (std::isinf(t)) return 1.0;
  if (t == 1.0) return kInf;
  return t / (t - 1.0);
}

/// (p, q, s, r) with 1/p + 1/q = 1/s. Any of p, q, r may be ∞.
struct ExponentTuple {
  double p = 2, q = 2, s = 1, r = 4;

  ExponentTuple() = default;
  ExponentTuple(double p_, double q_, double r_) : p(p_), q(q_), r(r_) {
    if (!(p >= 1 && q >= 1)) throw std::invalid_argument("ExponentTuple: p, q must be >= 1");
    if (!(r >= 1)) throw std::invalid_argument("ExponentTuple: r must be >= 1");
    const double inv = 1.0 / p + 1.0 / q;
    s = inv == 0 ? kInf : 1.0 / inv;
  }
  double r_prime() const { return conjugate(r); }
  /// 1/s' = 1 - 1/s; negative when s < 1.
  double inv_s_prime() const { return 1.0 - 1.0 / s; }
  bool in_main_region() const {
    const double rp = r_prime();
    return r > 2 && p > rp && q > rp && s > rp / 2 && s < r;
  }
};

/// h = {h_ω}: one function per frequency square, all on one grid.
struct SequenceH {
  Grid grid;
  std::map<FrequencySquare, SampledFunction> entries;

  SequenceH() = default;
  explicit SequenceH(const Grid& g) : grid(g) {}

  void set(const FrequencySquare& w, SampledFunction h) {
    if (!(h.grid == grid)) throw std::invalid_argument("SequenceH: grid mismatch");
    entries[w] = std::move(h);
  }
  bool contains(const FrequencySquare& w) const { return entries.count(w) != 0; }
  const SampledFunction& at(const FrequencySquare& w) const {
    auto it = entries.find(w);
    if (it == entries.end()) {
      std::ostringstream msg;
      msg << "SequenceH: no entry for square " << w;
      throw std::out_of_range(msg.str());
    }
    return it->second;
  }
  /// (Σ_ω |h_ω|^{r'})^{1/r'} pointwise.
  SampledFunction aggregate(double r_prime) const {
    std::vector<SampledFunction> parts;
    for (const auto& [w, h] : entries) parts.push_back(h);
    SampledFunction out(grid);
    for (std::size_t i = 0; i < grid.n; ++i) {
      double acc = 0;
      for (const auto& h : parts) {
        const double a = std::abs(h.values[i]);
        acc = std::isinf(r_prime) ? std::max(acc, a) : acc + std::pow(a, r_prime);
      }
      out.values[i] = std::isinf(r_prime) ? acc : std::pow(acc, 1.0 / r_prime);
    }
    return out;
  }
};

/// Pointwise ℓ^r aggregate (Σ |piece|^r)^{1/r}; r = ∞ gives the pointwise sup.
inline SampledFunction lr_aggregate(const Grid& grid, const std::vector<SampledFunction>& pieces, double r) {
  SampledFunction out(grid);
  for (std::size_t i = 0; i < grid.n; ++i) {
    double acc = 0;
    for (const auto& piece : pieces) {
      const double a = std::abs(piece.values[i]);
      acc = std::isinf(r) ? std::max(acc, a) : acc + std::pow(a, r);
    }
    out.values[i] = std::isinf(r) ? acc : std::pow(acc, 1.0 / r);
  }
  return out;
}

/// One-dimensional cutoff: smooth template bump on ω, or 1_ω (half-open).
inline double cutoff(const Interval& omega, double xi, bool sharp) {
  return sharp ? (omega.contains(xi) ? 1.0 : 0.0) : bump_on(omega, xi);
}

inline void check_band(const Grid& grid, const Interval& omega, bool sharp, const char* who) {
  const double half = sharp ? 0.5 * omega.length() : kBumpHalfWidth * omega.length();
  if (!grid.representable(omega.center() - half, omega.center() + half)) {
    std::ostringstream msg;
    msg << who << ": frequency interval [" << omega.lo << ", " << omega.hi << ") exceeds the Nyquist band";
    throw std::invalid_argument(msg.str());
  }
}

/// Frequency restriction of f by a multiplier m(ξ).
template <class Multiplier>
SampledFunction apply_multiplier(const Spectrum& f, Multiplier&& m) {
  Spectrum s{f.grid, f.coeffs};
  for (std::size_t k = 0; k < s.coeffs.size(); ++k) s.coeffs[k] *= m(f.grid.xi(k));
  return inverse_fourier(s);
}

/// Per-square bilinear pieces ∫∫ f̂(ξ)ĝ(η)Φ_ω(ξ,η)e^{2πix(ξ+η)}, in the order of Ω.
/// Φ_ω is the tensor of template bumps (or 1_ω when sharp), so each piece is
/// a product of two linear frequency restrictions.
inline std::vector<SampledFunction> bilinear_pieces(const SampledFunction& f, const SampledFunction& g,
                                                    const SquareCollection& omega, bool sharp) {
  f.check_same(g);
  for (const auto& w : omega) {
    check_band(f.grid, w.omega1.interval(), sharp, "eval_T_r");
    check_band(f.grid, w.omega2.interval(), sharp, "eval_T_r");
  }
  const Spectrum fs = fourier(f), gs = fourier(g);
  std::vector<SampledFunction> pieces(omega.size());
  parallel_for(omega.size(), [&](std::size_t i) {
    const Interval w1 = omega[i].omega1.interval(), w2 = omega[i].omega2.interval();
    const SampledFunction a = apply_multiplier(fs, [&](double xi) { return cutoff(w1, xi, sharp); });
    const SampledFunction b = apply_multiplier(gs, [&](double eta) { return cutoff(w2, eta, sharp); });
    pieces[i] = pointwise_product(a, b);
  });
  return pieces;
}

inline SampledFunction eval_T_r(const SampledFunction& f, const SampledFunction& g, const SquareCollection& omega,
                                double r, bool sharp) {
  if (!(r >= 1)) throw std::invalid_argument("eval_T_r: r must be >= 1");
  return lr_aggregate(f.grid, bilinear_pieces(f, g, omega, sharp), r);
}

inline void check_disjoint_intervals(const std::vector<Interval>& intervals, const char* who) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (!(intervals[i].length() > 0)) throw std::invalid_argument(std::string(who) + ": empty interval");
    for (std::size_t j = i + 1; j < intervals.size(); ++j)
      if (intervals[i].intersects(intervals[j]))
        throw std::invalid_argument(std::string(who) + ": intervals " + std::to_string(i) + " and " +
                                    std::to_string(j) + " overlap");
  }
}

/// Linear frequency projections of f onto each interval.
inline std::vector<SampledFunction> rf_pieces(const SampledFunction& f, const std::vector<Interval>& intervals,
                                              bool sharp) {
  check_disjoint_intervals(intervals, "eval_RF_r");
  for (const auto& I : intervals) check_band(f.grid, I, sharp, "eval_RF_r");
  const Spectrum fs = fourier(f);
  std::vector<SampledFunction> pieces(intervals.size());
  parallel_for(intervals.size(), [&](std::size_t i) {
    pieces[i] = apply_multiplier(fs, [&](double xi) { return cutoff(intervals[i], xi, sharp); });
  });
  return pieces;
}

inline SampledFunction eval_RF_r(const SampledFunction& f, const std::vector<Interval>& intervals, double r,
                                 bool sharp) {
  return lr_aggregate(f.grid, rf_pieces(f, intervals, sharp), r);
}

/// Pieces with multiplier 1_{[a,b)}(ξ - η). Computed by accumulating
/// ĉ_f(ξ)ĉ_g(η) into the output frequency ξ + η; O(N²) per interval.
inline std::vector<SampledFunction> lp_pieces(const SampledFunction& f, const SampledFunction& g,
                                              const std::vector<Interval>& intervals) {
  f.check_same(g);
  check_disjoint_intervals(intervals, "eval_LP");
  const Grid& grid = f.grid;
  const Spectrum fs = fourier(f), gs = fourier(g);
  const double L = grid.period;
  const auto N = static_cast<std::int64_t>(grid.n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(grid.n));
  std::vector<SampledFunction> pieces(intervals.size());
  parallel_for(intervals.size(), [&](std::size_t i) {
    const Interval& I = intervals[i];
    Spectrum out{grid, std::vector<cplx>(grid.n)};
    for (std::int64_t k = -N / 2; k < N / 2; ++k) {
      const cplx a = fs.coeffs[grid.slot(k)];
      if (a == cplx{}) continue;
      // ξ_k - η_l ∈ [lo, hi)  ⇔  l ∈ (k - hi·L, k - lo·L]
      const auto l_lo = static_cast<std::int64_t>(std::floor(k - I.hi * L)) + 1;
      const auto l_hi = static_cast<std::int64_t>(std::floor(k - I.lo * L));
      // One extra index on each side guards the floors against rounding.
      for (std::int64_t l = std::max(-N / 2, l_lo - 1); l <= std::min(N / 2 - 1, l_hi + 1); ++l)
        if (I.contains(static_cast<double>(k - l) / L)) out.coeffs[grid.slot(k + l)] += a * gs.coeffs[grid.slot(l)] * norm;
    }
    pieces[i] = inverse_fourier(out);
  });
  return pieces;
}

inline SampledFunction eval_LP(const SampledFunction& f, const SampledFunction& g,
                               const std::vector<Interval>& intervals, double r) {
  return lr_aggregate(f.grid, lp_pieces(f, g, intervals), r);
}

/// Everything the tile-level machinery needs about one (f, g, h, r)
/// instance: spectra, wave-packet pairings and localized maximal averages,
/// memoized. Not thread-safe; use one per thread.
class FormData {
 public:
  FormData(const SampledFunction& f, const SampledFunction& g, const SequenceH& h, double r)
      : grid_(f.grid), r_(r), fs_(fourier(f)), gs_(fourier(g)), h_(&h) {
    f.check_same(g);
    if (!h.entries.empty() && !(h.grid == grid_)) throw std::invalid_argument("FormData: h on a different grid");
    if (!(r > 1)) throw std::invalid_argument("FormData: r must exceed 1");
  }
  // h is held by reference and must outlive the FormData.
  FormData(const SampledFunction&, const SampledFunction&, SequenceH&&, double) = delete;

  const Grid& grid() const { return grid_; }
  double r() const { return r_; }
  double r_prime() const { return conjugate(r_); }
  const Spectrum& f_spectrum() const { return fs_; }
  const Spectrum& g_spectrum() const { return gs_; }
  const SequenceH& h() const { return *h_; }

  /// ⟨f, φ_{s1}⟩
  cplx pair_f(const TriTile& s) { return memo(pf_, s, [&] { return WavePacket(grid_, s, 1).pair_with(fs_); }); }
  /// ⟨g, φ_{s2}⟩
  cplx pair_g(const TriTile& s) { return memo(pg_, s, [&] { return WavePacket(grid_, s, 2).pair_with(gs_); }); }
  /// ⟨φ_{s3}, h_s⟩ (conjugate-linear in h)
  cplx pair_h(const TriTile& s) {
    return memo(ph_, s, [&] { return std::conj(WavePacket(grid_, s, 3).pair_with(h_spectrum(s.square))); });
  }
  double size_term_f(const TriTile& s) { return std::abs(pair_f(s)) / std::sqrt(s.spatial.length()); }
  double size_term_g(const TriTile& s) { return std::abs(pair_g(s)) / std::sqrt(s.spatial.length()); }

  /// ∫_I |ℳ(h_ω χ̃_I^M)|^{r'} dx. Zero when h has no entry for ω.
  double h_local(const DyadicInterval& I, const FrequencySquare& w) {
    const auto key = std::pair{I, w};
    auto it = hloc_.find(key);
    if (it != hloc_.end()) return it->second;
    double v = 0;
    if (h_->contains(w)) v = localized_maximal_integral(h_->at(w), I.interval(), r_prime());
    hloc_.emplace(key, v);
    return v;
  }

  /// Number of distinct localized maximal integrals computed so far.
  std::size_t h_local_evaluations() const { return hloc_.size(); }

  /// ∫_I |ℳ(u·χ̃_I^M)|^{r'}: the maximal function is taken over a window of
  /// 9|I| around I, outside which χ̃_I^M < 5^{-20}.
  static double localized_maximal_integral(const SampledFunction& u, const Interval& I, double rp) {
    const Grid& grid = u.grid;
    const double dx = grid.spacing();
    const auto n = static_cast<std::int64_t>(grid.n);
    const double pad = 4.0 * I.length();
    auto index_of = [&](double x) { return static_cast<std::int64_t>(std::ceil((x + 0.5 * grid.period) / dx - 1e-9)); };
    std::int64_t i0 = index_of(I.lo - pad), i1 = index_of(I.hi + pad);
    if (i1 - i0 > n) {  // window wraps the whole circle: use every sample once
      i0 = index_of(I.center() - 0.5 * grid.period);
      i1 = i0 + n;
    }
    const double exponent = kChiExponent * kChiPower;
    std::vector<double> a(static_cast<std::size_t>(i1 - i0));
    std::vector<double> xs(a.size());
    for (std::int64_t i = i0; i < i1; ++i) {
      const double x = grid.period * -0.5 + static_cast<double>(i) * dx;  // unwrapped position
      const std::size_t slot = static_cast<std::size_t>(((i % n) + n) % n);
      xs[static_cast<std::size_t>(i - i0)] = x;
      a[static_cast<std::size_t>(i - i0)] = std::abs(u.values[slot]) * chi_tilde(I, x, exponent);
    }
    const std::vector<double> m = detail::dyadic_maximal(a, false);
    double acc = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (I.contains(xs[i])) acc += std::pow(m[i], rp);
    return acc * dx;
  }

 private:
  template <class F>
  cplx memo(std::unordered_map<TriTile, cplx>& table, const TriTile& s, F&& compute) {
    auto it = table.find(s);
    if (it != table.end()) return it->second;
    const cplx v = compute();
    table.emplace(s, v);
    return v;
  }
  const Spectrum& h_spectrum(const FrequencySquare& w) {
    auto it = hs_.find(w);
    if (it != hs_.end()) return it->second;
    return hs_.emplace(w, fourier(h_->at(w))).first->second;
  }

  Grid grid_;
  double r_;
  Spectrum fs_, gs_;
  const SequenceH* h_;
  std::map<FrequencySquare, Spectrum> hs_;
  std::unordered_map<TriTile, cplx> pf_, pg_, ph_;
  std::map<std::pair<DyadicInterval, FrequencySquare>, double> hloc_;
};

/// Λ_S(f, g, h) = Σ_s |I_s|^{-1/2} ⟨f,φ_{s1}⟩⟨g,φ_{s2}⟩⟨φ_{s3},h_s⟩, summed in S order.
inline cplx trilinear_form(FormData& data, const TileCollection& S) {
  cplx acc{};
  for (const auto& s : S) {
    const cplx pf = data.pair_f(s);
    const cplx pg = data.pair_g(s);
    if (pf == cplx{} || pg == cplx{}) continue;
    acc += pf * pg * data.pair_h(s) / std::sqrt(s.spatial.length());
  }
  return acc;
}

inline cplx trilinear_form(const SampledFunction& f, const SampledFunction& g, const SequenceH& h,
                           const TileCollection& S, double r = 4.0) {
  for (const auto& s : S) h.at(s.square);  // reject missing entries up front
  FormData data(f, g, h, r);
  return trilinear_form(data, S);
}

/// Inner sums Σ_{s: ω_s = ω} |I_s|^{-1/2}⟨f,φ_{s1}⟩⟨g,φ_{s2}⟩φ_{s3}, one per ω ∈ Ω(S).
inline std::map<FrequencySquare, SampledFunction> model_pieces(const SampledFunction& f, const SampledFunction& g,
                                                               const TileCollection& S) {
  f.check_same(g);
  const Spectrum fs = fourier(f), gs = fourier(g);
  const auto groups = S.by_square();
  std::vector<FrequencySquare> keys;
  for (const auto& [w, tiles] : groups) keys.push_back(w);
  std::vector<SampledFunction> out(keys.size());
  parallel_for(keys.size(), [&](std::size_t i) {
    Spectrum acc{f.grid, std::vector<cplx>(f.grid.n)};
    for (const auto& s : groups.at(keys[i])) {
      const cplx a = WavePacket(f.grid, s, 1).pair_with(fs) * WavePacket(f.grid, s, 2).pair_with(gs) /
                     std::sqrt(s.spatial.length());
      WavePacket(f.grid, s, 3).accumulate(acc, a);
    }
    out[i] = inverse_fourier(acc);
  });
  std::map<FrequencySquare, SampledFunction> result;
  for (std::size_t i = 0; i < keys.size(); ++i) result.emplace(keys[i], std::move(out[i]));
  return result;
}

inline SampledFunction eval_model(const SampledFunction& f, const SampledFunction& g, const TileCollection& S,
                                  double r) {
  std::vector<SampledFunction> pieces;
  for (auto& [w, piece] : model_pieces(f, g, S)) pieces.push_back(std::move(piece));
  return lr_aggregate(f.grid, pieces, r);
}

}  // namespace tfa
