#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "tfa/operators.hpp"

using namespace tfa;

namespace {

// Oracle grid: small enough for O(N²)–O(N³) brute-force sums.
const Grid kGrid(256, 16.0);
const Interval kBand{0.0, 6.0};

double oracle_bump(const Interval& w, double xi) {
  const double u = (xi - 0.5 * (w.lo + w.hi)) / (0.55 * (w.hi - w.lo));
  return std::abs(u) < 1 ? std::exp(1 - 1 / (1 - u * u)) : 0.0;
}
double oracle_indicator(const Interval& w, double xi) { return (w.lo <= xi && xi < w.hi) ? 1.0 : 0.0; }

// Direct DFT, independent of FFTW: c_k = N^{-1/2} Σ f(x_n) e^{-2πiξ_k x_n}, keyed by signed index.
struct DirectSpectrum {
  std::vector<std::int64_t> index;
  std::vector<cplx> coeff;
};

DirectSpectrum direct_dft(const SampledFunction& f) {
  const Grid& g = f.grid;
  DirectSpectrum s;
  const auto N = static_cast<std::int64_t>(g.n);
  for (std::int64_t k = -N / 2; k < N / 2; ++k) {
    cplx acc{};
    for (std::size_t n = 0; n < g.n; ++n) acc += f[n] * std::polar(1.0, -2 * std::numbers::pi * double(k) / g.period * g.x(n));
    acc /= std::sqrt(double(g.n));
    if (std::abs(acc) > 1e-13) {
      s.index.push_back(k);
      s.coeff.push_back(acc);
    }
  }
  return s;
}

// Σ_k Σ_l c_f[k] c_g[l] m(ξ_k, η_l) e^{2πi(ξ_k+η_l)x} / N at every grid point.
template <class M>
SampledFunction direct_bilinear(const DirectSpectrum& F, const DirectSpectrum& G, M&& m) {
  const Grid& g = kGrid;
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
SampledFunction direct_linear(const DirectSpectrum& F, M&& m) {
  SampledFunction out(kGrid);
  for (std::size_t a = 0; a < F.index.size(); ++a) {
    const double xi = double(F.index[a]) / kGrid.period;
    const cplx c = F.coeff[a] * m(xi) / std::sqrt(double(kGrid.n));
    for (std::size_t n = 0; n < kGrid.n; ++n) out[n] += c * std::polar(1.0, 2 * std::numbers::pi * xi * kGrid.x(n));
  }
  return out;
}

double max_abs(const SampledFunction& f) { return lp_norm(f, kInf); }

double rel_error(const SampledFunction& got, const SampledFunction& want) {
  return max_abs(got - want) / std::max(max_abs(want), 1e-300);
}

double sum_r(const std::vector<double>& a, double r) {
  double acc = 0;
  for (double v : a) acc = std::isinf(r) ? std::max(acc, v) : acc + std::pow(v, r);
  return std::isinf(r) ? acc : std::pow(acc, 1 / r);
}

SquareCollection eight_squares() {
  return SquareCollection({FrequencySquare(0, 0, 1), FrequencySquare(0, 1, 3), FrequencySquare(0, 2, 0),
                           FrequencySquare(0, 3, 4), FrequencySquare(-1, 8, 5), FrequencySquare(-1, 9, 11),
                           FrequencySquare(0, 5, 2), FrequencySquare(0, 4, 0)});
}

struct Pair {
  SampledFunction f, g;
};

Pair random_pair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {random_bandlimited(kGrid, kBand, rng), random_bandlimited(kGrid, kBand, rng)};
}

}  // namespace

TEST(Exponents, HoelderAndRegion) {
  const ExponentTuple e(3, 6, 4);
  EXPECT_DOUBLE_EQ(e.s, 2.0);
  EXPECT_DOUBLE_EQ(e.r_prime(), 4.0 / 3.0);
  EXPECT_TRUE(e.in_main_region());
  EXPECT_DOUBLE_EQ(ExponentTuple(kInf, kInf, 4).s, kInf);
  EXPECT_FALSE(ExponentTuple(1.2, 1.2, 4).in_main_region());
  EXPECT_THROW(ExponentTuple(0.5, 2, 4), std::invalid_argument);
  EXPECT_EQ(conjugate(1.0), kInf);
  EXPECT_EQ(conjugate(kInf), 1.0);
}

TEST(TrTest, EmptyCollectionIsZero) {
  const auto [f, g] = random_pair(1);
  EXPECT_EQ(max_abs(eval_T_r(f, g, SquareCollection{}, 4, false)), 0.0);
}

TEST(TrTest, FullSharpSquareIsProduct) {
  std::mt19937_64 rng(2);
  const SampledFunction f = random_bandlimited(kGrid, Interval{0, 4}, rng), g = random_bandlimited(kGrid, Interval{0, 4}, rng);
  const SquareCollection one({FrequencySquare(2, 0, 0)});  // [0,4)² covers both spectra
  const SampledFunction fg = abs(pointwise_product(f, g));
  for (double r : {1.5, 4.0, kInf}) EXPECT_LT(rel_error(eval_T_r(f, g, one, r, true), fg), 1e-8) << r;
}

TEST(TrTest, MatchesDirectDoubleSum) {
  const auto [f, g] = random_pair(3);
  const DirectSpectrum F = direct_dft(f), G = direct_dft(g);
  const SquareCollection omega = eight_squares();
  for (bool sharp : {false, true}) {
    const auto pieces = bilinear_pieces(f, g, omega, sharp);
    std::vector<SampledFunction> oracle;
    for (const auto& w : omega) {
      const Interval w1 = w.omega1.interval(), w2 = w.omega2.interval();
      oracle.push_back(direct_bilinear(F, G, [&](double xi, double eta) {
        return sharp ? oracle_indicator(w1, xi) * oracle_indicator(w2, eta) : oracle_bump(w1, xi) * oracle_bump(w2, eta);
      }));
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) EXPECT_LT(rel_error(pieces[i], oracle[i]), 1e-8) << sharp << i;
    const SampledFunction got = eval_T_r(f, g, omega, 4, sharp);
    SampledFunction want(kGrid);
    for (std::size_t n = 0; n < kGrid.n; ++n) {
      std::vector<double> a;
      for (const auto& o : oracle) a.push_back(std::abs(o[n]));
      want[n] = sum_r(a, 4);
    }
    EXPECT_LT(rel_error(got, want), 1e-8);
  }
}

TEST(TrTest, LrMonotoneInR) {
  const auto [f, g] = random_pair(4);
  const SquareCollection omega = eight_squares();
  const SampledFunction t2 = eval_T_r(f, g, omega, 2, false), t4 = eval_T_r(f, g, omega, 4, false),
                        tinf = eval_T_r(f, g, omega, kInf, false);
  for (std::size_t n = 0; n < kGrid.n; ++n) {
    EXPECT_LE(t4[n].real(), t2[n].real() * (1 + 1e-12));
    EXPECT_LE(tinf[n].real(), t4[n].real() * (1 + 1e-12));
  }
  // r = ∞ is the pointwise sup over pieces
  const auto pieces = bilinear_pieces(f, g, omega, false);
  for (std::size_t n = 0; n < kGrid.n; n += 17) {
    double m = 0;
    for (const auto& p : pieces) m = std::max(m, std::abs(p[n]));
    EXPECT_EQ(tinf[n].real(), m);
  }
}

TEST(TrTest, NyquistViolationRejected) {
  const auto [f, g] = random_pair(5);
  EXPECT_THROW(eval_T_r(f, g, SquareCollection({FrequencySquare(0, 7, 0)}), 4, false), std::invalid_argument);
  EXPECT_THROW(eval_T_r(f, g, SquareCollection({FrequencySquare(0, 0, 0)}), 0.5, false), std::invalid_argument);
}

TEST(TrTest, SmoothPiecesStayInDilatedSquare) {
  // The product of the two smooth restrictions has spectrum inside
  // (11/10)ω₁ + (11/10)ω₂; pairing against content outside it gives 0.
  const auto [f, g] = random_pair(6);
  const SquareCollection omega = eight_squares();
  const auto pieces = bilinear_pieces(f, g, omega, false);
  std::mt19937_64 rng(60);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const Interval a = omega[i].omega1.interval().dilate(1.1), b = omega[i].omega2.interval().dilate(1.1);
    const Interval sum{a.lo + b.lo, a.hi + b.hi};
    if (sum.hi >= kGrid.nyquist()) continue;  // the sampled product would alias
    const Spectrum ps = fourier(pieces[i]);
    for (std::size_t k = 0; k < kGrid.n; ++k)
      if (!(sum.lo < kGrid.xi(k) && kGrid.xi(k) < sum.hi)) {
        EXPECT_LT(std::abs(ps.coeffs[k]), 1e-10);
      }
    const SampledFunction outside = random_bandlimited(kGrid, Interval{sum.lo - 2.0, sum.lo - 0.1}, rng);
    EXPECT_LT(std::abs(inner_product(pieces[i], outside)), 1e-10 * l2_norm(pieces[i]) * l2_norm(outside) + 1e-12);
  }
}

TEST(TrTest, BitReproducibleAcrossThreadCounts) {
  const auto [f, g] = random_pair(7);
  const SquareCollection omega = eight_squares();
  setenv("TFA_THREADS", "1", 1);
  const SampledFunction one = eval_T_r(f, g, omega, 4, false);
  setenv("TFA_THREADS", "4", 1);
  const SampledFunction four = eval_T_r(f, g, omega, 4, false);
  unsetenv("TFA_THREADS");
  EXPECT_EQ(one.values, four.values);
}

TEST(RFTest, FullIntervalIsAbsoluteValue) {
  const auto [f, g] = random_pair(8);
  EXPECT_LT(rel_error(eval_RF_r(f, {Interval{0, 6}}, 4, true), abs(f)), 1e-8);
}

TEST(RFTest, PlancherelForPartition) {
  const auto [f, g] = random_pair(9);
  const std::vector<Interval> parts{{0, 0.75}, {0.75, 2}, {2, 2.5}, {2.5, 4.125}, {4.125, 6}};
  EXPECT_NEAR(l2_norm(eval_RF_r(f, parts, 2, true)), l2_norm(f), 1e-10 * l2_norm(f));
}

TEST(RFTest, L4BelowL2OnRandomIntervals) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 6);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> cuts;
    for (int i = 0; i < 32; ++i) cuts.push_back(u(rng));
    std::sort(cuts.begin(), cuts.end());
    std::vector<Interval> intervals;
    for (int i = 0; i < 32; i += 2) intervals.push_back({cuts[i], cuts[i + 1]});
    const SampledFunction f = random_bandlimited(kGrid, kBand, rng);
    EXPECT_LE(l2_norm(eval_RF_r(f, intervals, 4, true)) / l2_norm(f), 1 + 1e-10);
  }
}

TEST(RFTest, MatchesDirectSumAndRejectsOverlap) {
  const auto [f, g] = random_pair(11);
  const DirectSpectrum F = direct_dft(f);
  const std::vector<Interval> intervals{{0.25, 1.5}, {2, 3}, {3.5, 5.25}};
  for (bool sharp : {false, true}) {
    const auto pieces = rf_pieces(f, intervals, sharp);
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      const SampledFunction want = direct_linear(F, [&](double xi) {
        return sharp ? oracle_indicator(intervals[i], xi) : oracle_bump(intervals[i], xi);
      });
      EXPECT_LT(rel_error(pieces[i], want), 1e-8);
    }
  }
  EXPECT_THROW(eval_RF_r(f, {Interval{0, 2}, Interval{1, 3}}, 4, true), std::invalid_argument);
}

TEST(LPTest, TrivialCases) {
  const auto [f, g] = random_pair(12);
  EXPECT_EQ(max_abs(eval_LP(f, g, {}, 4)), 0.0);
  // ξ − η ranges over (−6, 6)
  EXPECT_LT(rel_error(eval_LP(f, g, {Interval{-7, 7}}, 4), abs(pointwise_product(f, g))), 1e-8);
}

TEST(LPTest, MatchesDirectDoubleSum) {
  const auto [f, g] = random_pair(13);
  const DirectSpectrum F = direct_dft(f), G = direct_dft(g);
  // Endpoints on and off the 1/L lattice.
  const std::vector<Interval> intervals{{-5, -2.0625}, {-2.0625, 0.3}, {0.5, 1.25}, {2.71, 4}};
  const auto pieces = lp_pieces(f, g, intervals);
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const SampledFunction want =
        direct_bilinear(F, G, [&](double xi, double eta) { return oracle_indicator(intervals[i], xi - eta); });
    EXPECT_LT(rel_error(pieces[i], want), 1e-8) << i;
  }
}

namespace {

TileCollection small_tiles() {
  const SquareCollection omega({FrequencySquare(0, 0, 1), FrequencySquare(0, 2, 0), FrequencySquare(-1, 7, 3)});
  return tiles_from_squares(omega, Interval{-3, 3});
}

SequenceH random_h(const TileCollection& S, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SequenceH h(kGrid);
  for (const auto& w : S.squares()) {
    const TriTile probe = build_tritile(make_dyadic(-w.scale(), 0), w);
    h.set(w, random_bandlimited(kGrid, probe.omega3().dilate(1.2), rng));
  }
  return h;
}

cplx sample_pairing(const SampledFunction& f, const SampledFunction& phi) { return inner_product(f, phi); }

}  // namespace

TEST(ModelTest, EmptyAndSingleTile) {
  const auto [f, g] = random_pair(14);
  EXPECT_EQ(max_abs(eval_model(f, g, TileCollection{}, 4)), 0.0);
  const TriTile s = build_tritile(make_dyadic(0, 1), FrequencySquare(0, 1, 2));
  const SampledFunction got = eval_model(f, g, TileCollection({s}), 4);
  const SampledFunction p1 = WavePacket(kGrid, s, 1).sampled(), p2 = WavePacket(kGrid, s, 2).sampled(),
                        p3 = WavePacket(kGrid, s, 3).sampled();
  const double amp = std::abs(sample_pairing(f, p1) * sample_pairing(g, p2));
  for (std::size_t n = 0; n < kGrid.n; ++n) EXPECT_NEAR(got[n].real(), amp * std::abs(p3[n]), 1e-10 * amp);
}

TEST(ModelTest, InnerSumsMatchSampleSpaceOracle) {
  const auto [f, g] = random_pair(15);
  const TileCollection S = small_tiles();
  const auto pieces = model_pieces(f, g, S);
  for (const auto& [w, tiles] : S.by_square()) {
    SampledFunction want(kGrid);
    for (const auto& s : tiles) {
      const cplx a = sample_pairing(f, WavePacket(kGrid, s, 1).sampled()) *
                     sample_pairing(g, WavePacket(kGrid, s, 2).sampled()) / std::sqrt(s.spatial.length());
      want += a * WavePacket(kGrid, s, 3).sampled();
    }
    EXPECT_LT(rel_error(pieces.at(w), want), 1e-8) << w;
  }
}

TEST(ModelTest, DualityWithTrilinearForm) {
  const auto [f, g] = random_pair(16);
  const TileCollection S = small_tiles();
  const SequenceH h = random_h(S, 17);
  cplx dual{};
  for (const auto& [w, piece] : model_pieces(f, g, S)) dual += inner_product(piece, h.at(w));
  const cplx lambda = trilinear_form(f, g, h, S);
  EXPECT_GT(std::abs(lambda), 0.0);
  EXPECT_LT(std::abs(dual - lambda), 1e-8 * std::abs(lambda));
}

TEST(TrilinearTest, EmptyLinearAdditive) {
  const auto [f1, g] = random_pair(18);
  const auto [f2, unused] = random_pair(19);
  const TileCollection S = small_tiles();
  const SequenceH h = random_h(S, 20);
  EXPECT_EQ(trilinear_form(f1, g, h, TileCollection{}), cplx{});

  const cplx a(0.3, -1.2), b(2.0, 0.5);
  const cplx lhs = trilinear_form(a * f1 + b * f2, g, h, S);
  const cplx rhs = a * trilinear_form(f1, g, h, S) + b * trilinear_form(f2, g, h, S);
  EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::abs(rhs));
  // linear in g as well, conjugate-linear in h
  SequenceH h2 = h;
  for (auto& [w, v] : h2.entries) v *= a;
  EXPECT_LT(std::abs(trilinear_form(f1, g, h2, S) - std::conj(a) * trilinear_form(f1, g, h, S)),
            1e-10 * std::abs(trilinear_form(f1, g, h, S)));

  std::vector<TriTile> s1, s2;
  for (std::size_t i = 0; i < S.size(); ++i) (i % 3 == 0 ? s1 : s2).push_back(S.tiles()[i]);
  const cplx whole = trilinear_form(f1, g, h, S);
  const cplx parts = trilinear_form(f1, g, h, TileCollection(s1)) + trilinear_form(f1, g, h, TileCollection(s2));
  EXPECT_LT(std::abs(whole - parts), 1e-12 * std::abs(whole));
}

TEST(TrilinearTest, MissingEntryRejected) {
  const auto [f, g] = random_pair(21);
  const TileCollection S = small_tiles();
  SequenceH h = random_h(S, 22);
  h.entries.erase(h.entries.begin());
  EXPECT_THROW(trilinear_form(f, g, h, S), std::out_of_range);
}

TEST(SequenceHTest, AggregateAndGridCheck) {
  SequenceH h(kGrid);
  SampledFunction a(kGrid), b(kGrid);
  for (std::size_t n = 0; n < kGrid.n; ++n) a[n] = 3.0, b[n] = cplx(0, 4.0);
  h.set(FrequencySquare(0, 0, 0), a);
  h.set(FrequencySquare(0, 1, 1), b);
  EXPECT_NEAR(h.aggregate(2)[5].real(), 5.0, 1e-12);
  EXPECT_EQ(h.aggregate(kInf)[5].real(), 4.0);
  EXPECT_THROW(h.set(FrequencySquare(0, 2, 2), SampledFunction(Grid(128, 16.0))), std::invalid_argument);
}

TEST(FormDataTest, LocalizedMaximalIntegralDominatesLocalMass) {
  // ℳ ≥ |·| pointwise, so the integral is at least ∫_I |u|^{r'}.
  std::mt19937_64 rng(23);
  const SampledFunction u = random_bandlimited(kGrid, kBand, rng);
  const Interval I = make_dyadic(0, 2).interval();
  const double rp = 4.0 / 3.0;
  double local = 0;
  for (std::size_t n = 0; n < kGrid.n; ++n)
    if (I.contains(kGrid.x(n))) local += std::pow(std::abs(u[n]), rp) * kGrid.spacing();
  const double v = FormData::localized_maximal_integral(u, I, rp);
  EXPECT_GE(v, local * (1 - 1e-12));
  // and at most the integral of the global maximal function of |u|
  const SampledFunction m = maximal_function(u);
  double global = 0;
  for (std::size_t n = 0; n < kGrid.n; ++n)
    if (I.contains(kGrid.x(n))) global += std::pow(m[n].real(), rp) * kGrid.spacing();
  EXPECT_LE(v, global * (1 + 1e-12));
}
