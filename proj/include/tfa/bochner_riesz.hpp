#pragma once

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "operators.hpp"

namespace tfa {

/// Symbol parameters. The frequency plane is ℝ^{2d}; the code is written for
/// general d but every region in this library lives in ℝ², d = 1.
struct SymbolParams {
  double r = 4.0;
  double eps = 0.25;
  int d = 1;

  double r_prime() const { return conjugate(r); }
  double boundary_dim() const { return 2.0 * d - 1.0; }
  void validate() const {
    if (!(r > 2)) throw std::invalid_argument("SymbolParams: r must exceed 2");
    if (!(eps > 0)) throw std::invalid_argument("SymbolParams: eps must be positive");
    if (d < 1) throw std::invalid_argument("SymbolParams: d must be at least 1");
  }
};

/// φ(t) = t^{(2d−1)/r'} (1 + ln t)^{−(1/r'+ε)}, evaluated literally. For
/// t < 1/e the base of the log factor is negative and the power is real only
/// for integer exponents; elsewhere this throws std::domain_error.
inline double phi_weight(double t, const SymbolParams& p) {
  if (!(t > 0)) throw std::invalid_argument("phi_weight: t must be positive");
  const double rp = p.r_prime();
  const double v = std::pow(t, p.boundary_dim() / rp) * std::pow(1.0 + std::log(t), -(1.0 / rp + p.eps));
  if (std::isnan(v)) throw std::domain_error("phi_weight: (1 + log t) is negative and the exponent is not an integer");
  return v;
}

/// The same profile with 1 + |ln t|; positive and increasing on (0, 1], and the
/// form the shell weights actually realize.
inline double phi_weight_abs(double t, const SymbolParams& p) {
  if (!(t > 0)) throw std::invalid_argument("phi_weight_abs: t must be positive");
  const double rp = p.r_prime();
  return std::pow(t, p.boundary_dim() / rp) * std::pow(1.0 + std::abs(std::log(t)), -(1.0 / rp + p.eps));
}

/// Index used in the n-weights: shells n ≤ 1 share the weight of n = 1.
inline int weight_index(int n) { return std::max(n, 1); }

/// a_n = 2^{−n(2d−1)/r'} n^{−(1/r'+ε)}.
inline double shell_coefficient(int n, const SymbolParams& p) {
  const double rp = p.r_prime(), k = weight_index(n);
  return std::exp2(-k * p.boundary_dim() / rp) * std::pow(k, -(1.0 / rp + p.eps));
}

struct SymbolPiece {
  FrequencySquare square;
  int shell = 0;
  double coefficient = 0;  // a_n; the piece is a_n b_ω
};

/// m = Σ_n a_n Σ_{ω∈Ω_n} b_ω with b_ω the tensor template bump on ω, supported
/// in the 11/10 dilate of ω.
struct RoughSymbol {
  SymbolParams params;
  SquareCollection cover;
  std::vector<SymbolPiece> pieces;
  std::map<int, std::size_t> shell_counts;
  std::unordered_map<FrequencySquare, std::size_t> index;
  int min_scale = 0, max_scale = 0;

  static double bump(const FrequencySquare& w, double xi, double eta) {
    return bump_on(w.omega1.interval(), xi) * bump_on(w.omega2.interval(), eta);
  }
  double piece(std::size_t i, double xi, double eta) const { return pieces[i].coefficient * bump(pieces[i].square, xi, eta); }

  /// Pieces whose support can contain (ξ, η): the dilate of ω reaches 1/20 of a side
  /// past ω, so only ω's own cell and its eight neighbours at each scale qualify.
  template <class Visit>
  void for_each_near(double xi, double eta, Visit&& visit) const {
    for (int j = min_scale; j <= max_scale; ++j) {
      const double len = std::ldexp(1.0, j);
      const auto k1 = static_cast<std::int64_t>(std::floor(xi / len));
      const auto k2 = static_cast<std::int64_t>(std::floor(eta / len));
      for (std::int64_t a = k1 - 1; a <= k1 + 1; ++a)
        for (std::int64_t b = k2 - 1; b <= k2 + 1; ++b)
          if (auto it = index.find(FrequencySquare(j, a, b)); it != index.end()) visit(it->second);
    }
  }
  double operator()(double xi, double eta) const {
    double acc = 0;
    for_each_near(xi, eta, [&](std::size_t i) { acc += piece(i, xi, eta); });
    return acc;
  }
  /// The sum over every piece, without the index.
  double evaluate_all(double xi, double eta) const {
    double acc = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) acc += piece(i, xi, eta);
    return acc;
  }
  /// max |m| over a k×k lattice on the closed dilated square.
  double sup_on(const FrequencySquare& w, int k = 9) const {
    const Interval a = w.omega1.interval().dilate(1.1), b = w.omega2.interval().dilate(1.1);
    double best = 0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const double xi = a.lo + a.length() * i / (k - 1), eta = b.lo + b.length() * j / (k - 1);
        best = std::max(best, std::abs((*this)(xi, eta)));
      }
    return best;
  }
};

/// Builds the symbol on a Whitney cover; shells are read off the region's distance function.
inline RoughSymbol build_symbol(const OpenRegion& region, const SquareCollection& cover, const SymbolParams& p) {
  p.validate();
  if (cover.empty()) throw std::invalid_argument("build_symbol: empty cover");
  RoughSymbol m;
  m.params = p;
  m.cover = cover;
  for (const auto& w : cover) {
    const double dist = region.box_distance(box_of(w));
    if (!(dist > 0)) {
      std::ostringstream msg;
      msg << "build_symbol: square " << w << " touches the complement of the region";
      throw std::invalid_argument(msg.str());
    }
    const int n = shell_index(dist);
    m.index.emplace(w, m.pieces.size());
    m.pieces.push_back({w, n, shell_coefficient(n, p)});
    ++m.shell_counts[n];
  }
  m.min_scale = m.max_scale = cover[0].scale();
  for (const auto& w : cover) {
    m.min_scale = std::min(m.min_scale, w.scale());
    m.max_scale = std::max(m.max_scale, w.scale());
  }
  return m;
}

/// (Σ_n 2^{−n(2d−1)} n^{−1−r'ε} #Ω_n)^{1/r'} = (Σ_ω a_ω^{r'})^{1/r'}.
inline double shell_factor(const std::map<int, std::size_t>& counts, const SymbolParams& p) {
  const double rp = p.r_prime();
  double acc = 0;
  for (const auto& [n, c] : counts) {
    const double k = weight_index(n);
    acc += std::exp2(-k * p.boundary_dim()) * std::pow(k, -1.0 - rp * p.eps) * static_cast<double>(c);
  }
  if (!std::isfinite(acc)) throw std::runtime_error("shell_factor: sum is not finite");
  return std::pow(acc, 1.0 / rp);
}

inline double shell_factor(const SquareCollection& cover, const OpenRegion& region, const SymbolParams& p) {
  return shell_factor(shell_counts(cover, region), p);
}

/// Partial sums of the r'-th power of the shell factor, in increasing n.
inline std::vector<std::pair<int, double>> shell_partial_sums(const std::map<int, std::size_t>& counts,
                                                              const SymbolParams& p) {
  std::vector<std::pair<int, double>> out;
  double acc = 0;
  for (const auto& [n, c] : counts) {
    const double k = weight_index(n);
    acc += std::exp2(-k * p.boundary_dim()) * std::pow(k, -1.0 - p.r_prime() * p.eps) * static_cast<double>(c);
    out.emplace_back(n, acc);
  }
  return out;
}

struct Domination {
  SampledFunction lhs, rhs;  // |T_m(f,g)| and (Σ_ω|T_{b_ω}(f,g)|^r)^{1/r}·factor
  double factor = 0;
  double max_excess = 0;  // max(lhs − rhs), ≤ 0 up to rounding
  bool holds(double tol = 1e-8) const { return max_excess <= tol; }
};

/// Evaluates both sides of |T_m| ≤ (Σ|T_{b_ω}|^r)^{1/r}·(Σ a_ω^{r'})^{1/r'} on the grid.
inline Domination lr_domination(const SampledFunction& f, const SampledFunction& g, const RoughSymbol& m) {
  f.check_same(g);
  const Grid& grid = f.grid;
  const double r = m.params.r;
  for (const auto& pc : m.pieces) {
    check_band(grid, pc.square.omega1.interval(), false, "lr_domination");
    check_band(grid, pc.square.omega2.interval(), false, "lr_domination");
  }
  const Spectrum fs = fourier(f), gs = fourier(g);
  std::vector<SampledFunction> parts(m.pieces.size());
  parallel_for(m.pieces.size(), [&](std::size_t i) {
    const FrequencySquare& w = m.pieces[i].square;
    const SampledFunction a = apply_multiplier(fs, [&](double xi) { return bump_on(w.omega1.interval(), xi); });
    const SampledFunction b = apply_multiplier(gs, [&](double eta) { return bump_on(w.omega2.interval(), eta); });
    parts[i] = pointwise_product(a, b);
  });
  Domination out;
  out.factor = shell_factor(m.shell_counts, m.params);
  out.lhs = SampledFunction(grid);
  out.rhs = SampledFunction(grid);
  out.max_excess = -kInf;
  for (std::size_t x = 0; x < grid.n; ++x) {
    cplx tm{};
    double lr = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      tm += m.pieces[i].coefficient * parts[i][x];
      lr += std::pow(std::abs(parts[i][x]), r);
    }
    out.lhs.values[x] = std::abs(tm);
    out.rhs.values[x] = std::pow(lr, 1.0 / r) * out.factor;
    out.max_excess = std::max(out.max_excess, out.lhs[x].real() - out.rhs[x].real());
  }
  return out;
}

// ---------------------------------------------------------------- shell statistics

struct ShellFit {
  double slope = 0;      // least-squares slope of log2 #Ω_n against n
  double max_ratio = 0;  // max #Ω_n / 2^{n(2d−1)}
};

/// Fit over shells n_lo ≤ n ≤ n_hi with a positive count.
inline ShellFit fit_shell_counts(const std::map<int, std::size_t>& counts, int n_lo, int n_hi, int d = 1) {
  std::vector<double> xs, ys;
  ShellFit fit;
  for (const auto& [n, c] : counts) {
    if (n < n_lo || n > n_hi || c == 0) continue;
    xs.push_back(n);
    ys.push_back(std::log2(static_cast<double>(c)));
    fit.max_ratio = std::max(fit.max_ratio, static_cast<double>(c) * std::exp2(-n * (2.0 * d - 1.0)));
  }
  if (xs.size() < 2) throw std::invalid_argument("fit_shell_counts: need at least two shells");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.slope = sxy / sxx;
  return fit;
}

/// max |m| over each shell's squares.
inline std::map<int, double> shell_sup(const RoughSymbol& m) {
  std::map<int, double> out;
  for (const auto& pc : m.pieces) out[pc.shell] = std::max(out[pc.shell], m.sup_on(pc.square));
  return out;
}

/// Disc used by the experiments: centre (0, 0), radius 2.
inline OpenRegion experiment_disc() { return OpenRegion::disc(0.0, 0.0, 2.0); }

// ---------------------------------------------------------------- export

/// One line per square: "j k1 k2 coefficient".
inline std::string export_symbol(const RoughSymbol& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& pc : m.pieces)
    os << pc.square.scale() << ' ' << pc.square.omega1.position << ' ' << pc.square.omega2.position << ' '
       << pc.coefficient << '\n';
  return os.str();
}

inline std::string shell_histogram_csv(const std::map<int, std::size_t>& counts) {
  std::ostringstream os;
  os << "n,count\n";
  for (const auto& [n, c] : counts) os << n << ',' << c << '\n';
  return os.str();
}

}  // namespace tfa
