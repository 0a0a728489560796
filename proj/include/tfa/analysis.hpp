#pragma once

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <deque>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace tfa {

using cplx = std::complex<double>;

/// Periodic grid of N points on [-L/2, L/2). Frequencies are k/L for
/// integer k in [-N/2, N/2).
struct Grid {
  std::size_t n = 0;
  double period = 0.0;

  Grid() = default;
  Grid(std::size_t num_points, double L) : n(num_points), period(L) {
    if (n < 2 || !std::has_single_bit(n)) throw std::invalid_argument("Grid: N must be a power of two >= 2");
    if (!(L > 0)) throw std::invalid_argument("Grid: period must be positive");
  }

  double spacing() const { return period / static_cast<double>(n); }
  double x(std::size_t i) const { return -0.5 * period + static_cast<double>(i) * spacing(); }
  double nyquist() const { return static_cast<double>(n) / (2.0 * period); }
  /// Signed frequency index of FFT slot k.
  std::int64_t signed_index(std::size_t k) const {
    return k < n / 2 ? static_cast<std::int64_t>(k) : static_cast<std::int64_t>(k) - static_cast<std::int64_t>(n);
  }
  std::size_t slot(std::int64_t m) const {
    const auto N = static_cast<std::int64_t>(n);
    return static_cast<std::size_t>(((m % N) + N) % N);
  }
  double xi(std::size_t k) const { return static_cast<double>(signed_index(k)) / period; }
  /// Whether [lo, hi] lies inside the representable band [-N/(2L), N/(2L)).
  bool representable(double lo, double hi) const { return lo >= -nyquist() && hi < nyquist(); }

  friend bool operator==(const Grid&, const Grid&) = default;
};

struct SampledFunction {
  Grid grid;
  std::vector<cplx> values;

  SampledFunction() = default;
  explicit SampledFunction(const Grid& g) : grid(g), values(g.n, cplx{}) {}
  SampledFunction(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n) throw std::invalid_argument("SampledFunction: sample count does not match grid");
  }

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  SampledFunction& operator+=(const SampledFunction& o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) values[i] += o.values[i];
    return *this;
  }
  SampledFunction& operator*=(cplx a) {
    for (auto& v : values) v *= a;
    return *this;
  }
  friend SampledFunction operator+(SampledFunction a, const SampledFunction& b) { return a += b; }
  friend SampledFunction operator*(cplx a, SampledFunction f) { return f *= a; }
  friend SampledFunction operator-(SampledFunction a, const SampledFunction& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.size(); ++i) a.values[i] -= b.values[i];
    return a;
  }

  void check_same(const SampledFunction& o) const {
    if (!(grid == o.grid)) throw std::invalid_argument("grid mismatch");
  }

  template <class F>
  static SampledFunction from(const Grid& g, F&& fn) {
    SampledFunction out(g);
    for (std::size_t i = 0; i < g.n; ++i) out.values[i] = fn(g.x(i));
    return out;
  }
};

inline SampledFunction pointwise_product(const SampledFunction& a, const SampledFunction& b) {
  a.check_same(b);
  SampledFunction out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

inline SampledFunction abs(const SampledFunction& f) {
  SampledFunction out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = std::abs(f.values[i]);
  return out;
}

/// Unitary Fourier coefficients in FFT slot order:
///   c_k = N^{-1/2} Σ_n f(x_n) e^{-2πi ξ_k x_n},   f(x_n) = N^{-1/2} Σ_k c_k e^{2πi ξ_k x_n}.
struct Spectrum {
  Grid grid;
  std::vector<cplx> coeffs;
};

namespace detail {

class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }
  std::pair<fftw_plan, fftw_plan> get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> a(n), b(n);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan fwd = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, flags);
    fftw_plan bwd = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD, flags);
    return plans_[n] = {fwd, bwd};
  }

 private:
  FftPlans() = default;
  std::mutex mutex_;
  std::map<std::size_t, std::pair<fftw_plan, fftw_plan>> plans_;
};

inline void execute(fftw_plan p, const std::vector<cplx>& in, std::vector<cplx>& out) {
  // fftw_execute_dft is thread-safe and does not modify its input for out-of-place plans.
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace detail

inline Spectrum fourier(const SampledFunction& f) {
  const std::size_t n = f.grid.n;
  Spectrum s{f.grid, std::vector<cplx>(n)};
  detail::execute(detail::FftPlans::instance().get(n).first, f.values, s.coeffs);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) s.coeffs[k] *= (k % 2 ? -scale : scale);
  return s;
}

inline SampledFunction inverse_fourier(const Spectrum& s) {
  const std::size_t n = s.grid.n;
  std::vector<cplx> tmp(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) tmp[k] = s.coeffs[k] * (k % 2 ? -scale : scale);
  SampledFunction f(s.grid);
  detail::execute(detail::FftPlans::instance().get(n).second, tmp, f.values);
  return f;
}

/// (Σ |f|^p dx)^{1/p}; p = ∞ gives max |f|.
inline double lp_norm(const SampledFunction& f, double p) {
  if (std::isinf(p)) {
    double m = 0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0;
  for (const auto& v : f.values) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid.spacing(), 1.0 / p);
}

inline double l2_norm(const SampledFunction& f) {
  double acc = 0;
  for (const auto& v : f.values) acc += std::norm(v);
  return std::sqrt(acc * f.grid.spacing());
}

/// ℓ² norm computed from the spectrum; equals l2_norm of the inverse transform.
inline double l2_norm(const Spectrum& s) {
  double acc = 0;
  for (const auto& v : s.coeffs) acc += std::norm(v);
  return std::sqrt(acc * s.grid.spacing());
}

/// Σ f·conj(g)·dx.
inline cplx inner_product(const SampledFunction& f, const SampledFunction& g) {
  f.check_same(g);
  cplx acc{};
  for (std::size_t i = 0; i < f.size(); ++i) acc += f.values[i] * std::conj(g.values[i]);
  return acc * f.grid.spacing();
}

inline cplx inner_product(const Spectrum& f, const Spectrum& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("inner_product: grid mismatch");
  cplx acc{};
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) acc += f.coeffs[k] * std::conj(g.coeffs[k]);
  return acc * f.grid.spacing();
}

/// Random function with Fourier coefficients i.i.d. complex Gaussian on the
/// frequencies inside `band`, zero elsewhere.
template <class Rng>
SampledFunction random_bandlimited(const Grid& grid, const Interval& band, Rng& rng) {
  std::normal_distribution<double> normal;
  Spectrum s{grid, std::vector<cplx>(grid.n)};
  for (std::size_t k = 0; k < grid.n; ++k)
    if (band.contains(grid.xi(k))) s.coeffs[k] = {normal(rng), normal(rng)};
  return inverse_fourier(s);
}

/// (1 + dist(x, I)/|I|)^{-exponent}.
inline double chi_tilde(const Interval& I, double x, double exponent) {
  if (!(I.length() > 0)) throw std::invalid_argument("chi_tilde: |I| must be positive");
  return std::pow(1.0 + I.distance_to(x) / I.length(), -exponent);
}

/// Base decay exponent of χ̃ and the power M used wherever χ̃^M appears.
inline constexpr double kChiExponent = 10.0;
inline constexpr double kChiPower = 2.0;

/// χ̃_I^{exponent/10} sampled on the grid, with distance measured on the circle ℝ/Lℤ.
inline SampledFunction chi_tilde_on(const Grid& grid, const Interval& I, double exponent) {
  SampledFunction out(grid);
  const double L = grid.period;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    double d = I.distance_to(x);
    d = std::min({d, I.distance_to(x + L), I.distance_to(x - L)});
    out.values[i] = std::pow(1.0 + d / I.length(), -exponent);
  }
  return out;
}

/// Template profile exp(1 - 1/(1 - u²)) on |u| < 1: C^∞, peak 1 at u = 0.
inline double bump(double u) {
  if (!(std::abs(u) < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

/// Half-width of the template support relative to |ω|: supp ⊆ (11/10)ω.
inline constexpr double kBumpHalfWidth = 0.55;

/// b((ξ - c(ω)) / (0.55|ω|)).
inline double bump_on(const Interval& omega, double xi) {
  return bump((xi - omega.center()) / (kBumpHalfWidth * omega.length()));
}

/// φ_{s_j}: L²-normalised, Fourier coefficients b_ω(ξ)·e^{-2πiξ c(I_s)} on
/// the dilate (11/10)ω_{s_j}, exactly zero elsewhere.
class WavePacket {
 public:
  WavePacket(const Grid& grid, const TriTile& tile, int j) : grid_(grid), tile_(tile), j_(j) {
    const Interval omega = tile.frequency(j);
    const double half = kBumpHalfWidth * omega.length();
    const double lo = omega.center() - half, hi = omega.center() + half;
    if (!grid.representable(lo, hi)) {
      std::ostringstream msg;
      msg << "wave packet for tile " << tile << " (component " << j << ") exceeds the Nyquist band ±"
          << grid.nyquist();
      throw std::invalid_argument(msg.str());
    }
    if (tile.spatial.length() < 4.0 * grid.spacing()) {
      std::ostringstream msg;
      msg << "wave packet for tile " << tile << ": |I_s| is below 4 grid spacings";
      throw std::invalid_argument(msg.str());
    }
    const double L = grid.period;
    first_ = static_cast<std::int64_t>(std::floor(lo * L));
    const auto last = static_cast<std::int64_t>(std::ceil(hi * L));
    const double xc = tile.spatial.center();
    double energy = 0;
    for (std::int64_t m = first_; m <= last; ++m) {
      const double xi = static_cast<double>(m) / L;
      const double b = bump_on(omega, xi);
      coeffs_.push_back(b * std::polar(1.0, -2.0 * std::numbers::pi * xi * xc));
      energy += b * b;
    }
    const double scale = 1.0 / std::sqrt(energy * grid.spacing());
    for (auto& c : coeffs_) c *= scale;
  }

  const Grid& grid() const { return grid_; }
  const TriTile& tile() const { return tile_; }
  int component() const { return j_; }
  /// Signed frequency index of the first stored coefficient.
  std::int64_t first_index() const { return first_; }
  const std::vector<cplx>& coefficients() const { return coeffs_; }

  Spectrum spectrum() const {
    Spectrum s{grid_, std::vector<cplx>(grid_.n)};
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      s.coeffs[grid_.slot(first_ + static_cast<std::int64_t>(i))] = coeffs_[i];
    return s;
  }
  SampledFunction sampled() const { return inverse_fourier(spectrum()); }

  /// ⟨f, φ⟩ from the spectrum of f in O(#support).
  cplx pair_with(const Spectrum& f) const {
    cplx acc{};
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      acc += f.coeffs[grid_.slot(first_ + static_cast<std::int64_t>(i))] * std::conj(coeffs_[i]);
    return acc * grid_.spacing();
  }

  /// Adds a·φ to the spectrum.
  void accumulate(Spectrum& s, cplx a) const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      s.coeffs[grid_.slot(first_ + static_cast<std::int64_t>(i))] += a * coeffs_[i];
  }

 private:
  Grid grid_;
  TriTile tile_;
  int j_;
  std::int64_t first_ = 0;
  std::vector<cplx> coeffs_;
};

inline WavePacket make_wave_packet(const Grid& grid, const TriTile& tile, int j) { return {grid, tile, j}; }

namespace detail {

// Max over windows of 2^m consecutive samples containing each index. With
// `periodic` the windows wrap; otherwise only windows inside [0, n) count.
inline std::vector<double> dyadic_maximal(const std::vector<double>& a, bool periodic) {
  const std::size_t n = a.size();
  std::vector<double> prefix(2 * n + 1, 0.0);
  for (std::size_t i = 0; i < 2 * n; ++i) prefix[i + 1] = prefix[i] + a[i % n];
  std::vector<double> best = a;  // windows of one sample, exact
  std::vector<double> avg(n), ext;
  constexpr double none = -1.0;
  for (std::size_t len = 2; len <= n; len *= 2) {
    const std::size_t starts = periodic ? n : n - len + 1;
    for (std::size_t s = 0; s < starts; ++s) avg[s] = (prefix[s + len] - prefix[s]) / static_cast<double>(len);
    // best[i] = max over starts s in [i-len+1, i]; ext[t] holds the window starting at t-len+1.
    ext.resize(n + len - 1);
    for (std::size_t t = 0; t < ext.size(); ++t) {
      if (periodic) {
        ext[t] = avg[(t + n - (len - 1)) % n];
      } else {
        const auto s = static_cast<std::int64_t>(t) - static_cast<std::int64_t>(len - 1);
        ext[t] = (s >= 0 && s < static_cast<std::int64_t>(starts)) ? avg[static_cast<std::size_t>(s)] : none;
      }
    }
    std::deque<std::size_t> dq;
    for (std::size_t t = 0; t < ext.size(); ++t) {
      while (!dq.empty() && ext[dq.back()] <= ext[t]) dq.pop_back();
      dq.push_back(t);
      if (dq.front() + len <= t) dq.pop_front();
      if (t + 1 >= len) {
        const std::size_t i = t + 1 - len;
        best[i] = std::max(best[i], ext[dq.front()]);
      }
    }
  }
  return best;
}

}  // namespace detail

/// Uncentred maximal function over windows of 2^m consecutive samples at
/// every shift, periodic. Within a factor 2 of the full uncentred operator.
inline SampledFunction maximal_function(const SampledFunction& f) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f.values[i]);
  const std::vector<double> best = detail::dyadic_maximal(a, true);
  SampledFunction out(f.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = best[i];
  return out;
}

/// Binary format: uint64 N, float64 L, then N interleaved (re, im) float64,
/// all little-endian.
inline void write_binary(std::ostream& os, const SampledFunction& f) {
  static_assert(std::endian::native == std::endian::little, "binary format assumes a little-endian host");
  const std::uint64_t n = f.grid.n;
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&f.grid.period), sizeof(double));
  os.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
}

inline SampledFunction read_binary(std::istream& is) {
  std::uint64_t n = 0;
  double L = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&L), sizeof L);
  if (!is) throw std::runtime_error("read_binary: truncated header");
  SampledFunction f(Grid(n, L));
  is.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
  if (!is) throw std::runtime_error("read_binary: truncated samples");
  return f;
}

}  // namespace tfa
