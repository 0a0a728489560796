#pragma once

// Brute-force reference evaluations: direct DFT sums, no FFT, no cached
// packets. O(N²) or worse; meant for grids of a few hundred points.

#include <cmath>
#include <numbers>
#include <vector>

#include "operators.hpp"

namespace tfa::oracle {

inline double bump_at(const Interval& w, double xi) {
  const double u = (xi - 0.5 * (w.lo + w.hi)) / (0.55 * (w.hi - w.lo));
  return std::abs(u) < 1 ? std::exp(1 - 1 / (1 - u * u)) : 0.0;
}
inline double indicator_at(const Interval& w, double xi) { return (w.lo <= xi && xi < w.hi) ? 1.0 : 0.0; }
inline double cutoff_at(const Interval& w, double xi, bool sharp) { return sharp ? indicator_at(w, xi) : bump_at(w, xi); }

/// c_k = N^{-1/2} Σ_n f(x_n) e^{-2πiξ_k x_n}, nonzero entries only, keyed by signed index k.
struct DirectSpectrum {
  Grid grid;
  std::vector<std::int64_t> index;
  std::vector<cplx> coeff;
};

inline DirectSpectrum dft(const SampledFunction& f) {
  const Grid& g = f.grid;
  DirectSpectrum s{g, {}, {}};
  const auto N = static_cast<std::int64_t>(g.n);
  for (std::int64_t k = -N / 2; k < N / 2; ++k) {
    cplx acc{};
    for (std::size_t n = 0; n < g.n; ++n)
      acc += f[n] * std::polar(1.0, -2 * std::numbers::pi * double(k) / g.period * g.x(n));
    acc /= std::sqrt(double(g.n));
    if (std::abs(acc) > 1e-13) {
      s.index.push_back(k);
      s.coeff.push_back(acc);
    }
  }
  return s;
}

/// Σ_k Σ_l c_f[k] c_g[l] m(ξ_k, η_l) e^{2πi(ξ_k+η_l)x} / N.
template <class M>
SampledFunction bilinear(const DirectSpectrum& F, const DirectSpectrum& G, M&& m) {
  const Grid& g = F.grid;
  SampledFunction out(g);
  for (std::size_t a = 0; a < F.index.size(); ++a)
    for (std::size_t b = 0; b < G.index.size(); ++b) {
      const double xi = double(F.index[a]) / g.period, eta = double(G.index[b]) / g.period;
      const double w = m(xi, eta);
      if (w == 0) continue;
      const cplx c = F.coeff[a] * G.coeff[b] * w / double(g.n);
      for (std::size_t n = 0; n < g.n; ++n) out[n] += c * std::polar(1.0, 2 * std::numbers::pi * (xi + eta) * g.x(n));
    }
  return out;
}

template <class M>
SampledFunction linear(const DirectSpectrum& F, M&& m) {
  const Grid& g = F.grid;
  SampledFunction out(g);
  for (std::size_t a = 0; a < F.index.size(); ++a) {
    const double xi = double(F.index[a]) / g.period;
    const cplx c = F.coeff[a] * m(xi) / std::sqrt(double(g.n));
    for (std::size_t n = 0; n < g.n; ++n) out[n] += c * std::polar(1.0, 2 * std::numbers::pi * xi * g.x(n));
  }
  return out;
}

inline double lr_sum(const std::vector<double>& a, double r) {
  double acc = 0;
  for (double v : a) acc = std::isinf(r) ? std::max(acc, v) : acc + std::pow(v, r);
  return std::isinf(r) ? acc : std::pow(acc, 1 / r);
}

inline SampledFunction aggregate(const Grid& g, const std::vector<SampledFunction>& pieces, double r) {
  SampledFunction out(g);
  for (std::size_t n = 0; n < g.n; ++n) {
    std::vector<double> a;
    for (const auto& p : pieces) a.push_back(std::abs(p[n]));
    out[n] = lr_sum(a, r);
  }
  return out;
}

inline SampledFunction T_r(const SampledFunction& f, const SampledFunction& g, const SquareCollection& omega, double r,
                           bool sharp) {
  const DirectSpectrum F = dft(f), G = dft(g);
  std::vector<SampledFunction> pieces;
  for (const auto& w : omega) {
    const Interval w1 = w.omega1.interval(), w2 = w.omega2.interval();
    pieces.push_back(bilinear(F, G, [&](double xi, double eta) { return cutoff_at(w1, xi, sharp) * cutoff_at(w2, eta, sharp); }));
  }
  return aggregate(f.grid, pieces, r);
}

inline SampledFunction RF_r(const SampledFunction& f, const std::vector<Interval>& intervals, double r, bool sharp) {
  const DirectSpectrum F = dft(f);
  std::vector<SampledFunction> pieces;
  for (const auto& I : intervals) pieces.push_back(linear(F, [&](double xi) { return cutoff_at(I, xi, sharp); }));
  return aggregate(f.grid, pieces, r);
}

inline SampledFunction LP(const SampledFunction& f, const SampledFunction& g, const std::vector<Interval>& intervals,
                          double r) {
  const DirectSpectrum F = dft(f), G = dft(g);
  std::vector<SampledFunction> pieces;
  for (const auto& I : intervals)
    pieces.push_back(bilinear(F, G, [&](double xi, double eta) { return indicator_at(I, xi - eta); }));
  return aggregate(f.grid, pieces, r);
}

/// φ_{s_j}(x_n) by direct synthesis: coefficients b_ω(ξ)e^{-2πiξc(I_s)} on the
/// frequency lattice, scaled to unit L² norm.
inline SampledFunction packet(const Grid& g, const TriTile& s, int j) {
  const Interval w = s.frequency(j);
  const double c = s.spatial.center();
  const auto N = static_cast<std::int64_t>(g.n);
  std::vector<std::pair<double, cplx>> coeffs;
  double energy = 0;
  for (std::int64_t k = -N / 2; k < N / 2; ++k) {
    const double xi = double(k) / g.period, b = bump_at(w, xi);
    if (b == 0) continue;
    coeffs.emplace_back(xi, b * std::polar(1.0, -2 * std::numbers::pi * xi * c));
    energy += b * b;
  }
  SampledFunction out(g);
  const double scale = 1.0 / std::sqrt(energy * g.spacing() * double(g.n));
  for (std::size_t n = 0; n < g.n; ++n)
    for (const auto& [xi, a] : coeffs) out[n] += scale * a * std::polar(1.0, 2 * std::numbers::pi * xi * g.x(n));
  return out;
}

inline cplx pairing(const SampledFunction& f, const SampledFunction& phi) {
  cplx acc{};
  for (std::size_t n = 0; n < f.size(); ++n) acc += f[n] * std::conj(phi[n]);
  return acc * f.grid.spacing();
}

inline SampledFunction model(const SampledFunction& f, const SampledFunction& g, const TileCollection& S, double r) {
  const Grid& grid = f.grid;
  std::vector<SampledFunction> pieces;
  for (const auto& [w, tiles] : S.by_square()) {
    SampledFunction piece(grid);
    for (const auto& s : tiles) {
      const cplx a = pairing(f, packet(grid, s, 1)) * pairing(g, packet(grid, s, 2)) / std::sqrt(s.spatial.length());
      const SampledFunction p3 = packet(grid, s, 3);
      for (std::size_t n = 0; n < grid.n; ++n) piece[n] += a * p3[n];
    }
    pieces.push_back(std::move(piece));
  }
  return aggregate(grid, pieces, r);
}

inline double max_abs(const SampledFunction& f) {
  double m = 0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

/// max|got − want| / max|want|.
inline double rel_error(const SampledFunction& got, const SampledFunction& want) {
  double d = 0;
  for (std::size_t n = 0; n < got.size(); ++n) d = std::max(d, std::abs(got[n] - want[n]));
  return d / std::max(max_abs(want), 1e-300);
}

}  // namespace tfa::oracle
