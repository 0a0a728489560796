#include <gtest/gtest.h>

#include <iostream>
#include <random>

#include "tfa/bochner_riesz.hpp"
#include "tfa/calibrated_constants.hpp"

using namespace tfa;

namespace {

const Grid kGrid(1024, 64.0);
const SymbolParams kParams{4.0, 0.25, 1};
constexpr double kRegression = 1.5;

const SquareCollection& disc_cover(int depth) {
  static std::map<int, SquareCollection> cache;
  auto it = cache.find(depth);
  if (it == cache.end()) it = cache.emplace(depth, whitney_cover(experiment_disc(), depth)).first;
  return it->second;
}

double log_exponent(const SymbolParams& p) { return 1.0 / p.r_prime() + p.eps; }

}  // namespace

// ------------------------------------------------------------ φ

TEST(PhiWeight, OneAtOne) {
  for (double r : {3.0, 4.0, 8.0})
    for (double eps : {0.1, 0.25, 1.0}) EXPECT_DOUBLE_EQ(phi_weight(1.0, {r, eps, 1}), 1.0);
}

TEST(PhiWeight, QuarterByFormula) {
  // r' = 4/3 and ε = 1/4 make the log exponent exactly −1.
  const double want = std::pow(0.25, 0.75) / (1.0 + std::log(0.25));
  EXPECT_NEAR(phi_weight(0.25, kParams), want, 1e-15);
  EXPECT_LT(phi_weight(0.25, kParams), 0.0);
}

TEST(PhiWeight, DomainErrors) {
  EXPECT_THROW(phi_weight(0.0, kParams), std::invalid_argument);
  EXPECT_THROW(phi_weight(-1.0, kParams), std::invalid_argument);
  EXPECT_THROW(phi_weight(0.25, {4.0, 0.3, 1}), std::domain_error);
  EXPECT_THROW(phi_weight_abs(0.0, kParams), std::invalid_argument);
}

TEST(PhiWeight, DoublingRatioApproachesPowerOfTwo) {
  // φ(2t)/φ(t) = 2^{(2d−1)/r'}·((1+ln 2t)/(1+ln t))^{−b}; the log factor tends to 1.
  const double target = std::exp2(0.75);
  double prev = kInf;
  for (double t : {1.0, 1e3, 1e6, 1e12}) {
    const double ratio = phi_weight(2 * t, kParams) / phi_weight(t, kParams);
    const double log_part = std::pow((1 + std::log(2 * t)) / (1 + std::log(t)), -log_exponent(kParams));
    EXPECT_NEAR(ratio, target * log_part, 1e-12);
    const double gap = std::abs(ratio / target - 1);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 0.03);
}

TEST(PhiWeight, AbsoluteVariantIncreasing) {
  double prev = 0;
  for (double t = 1.0 / 1024; t <= 1.0; t *= 2) {
    const double v = phi_weight_abs(t, kParams);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_DOUBLE_EQ(phi_weight_abs(1.0, kParams), 1.0);
}

// ------------------------------------------------------------ symbol

TEST(BuildSymbol, RejectsEmptyCoverAndBadParams) {
  EXPECT_THROW(build_symbol(experiment_disc(), SquareCollection{}, kParams), std::invalid_argument);
  EXPECT_THROW(build_symbol(experiment_disc(), disc_cover(3), {2.0, 0.25, 1}), std::invalid_argument);
  EXPECT_THROW(build_symbol(experiment_disc(), disc_cover(3), {4.0, 0.0, 1}), std::invalid_argument);
}

TEST(BuildSymbol, SingleSquareSatisfiesCondition) {
  const OpenRegion region = OpenRegion::open_square(0, 0, 1);
  for (const FrequencySquare w : {FrequencySquare(-2, 1, 1), FrequencySquare(-3, 3, 2), FrequencySquare(-4, 7, 7)}) {
    const RoughSymbol m = build_symbol(region, SquareCollection({w}), kParams);
    ASSERT_EQ(m.pieces.size(), 1u);
    const double dist = region.box_distance(box_of(w));
    const int n = shell_index(dist);
    EXPECT_EQ(m.pieces[0].shell, n);
    EXPECT_DOUBLE_EQ(m.pieces[0].coefficient, shell_coefficient(n, kParams));
    // One bump peaking at 1: sup |m| = a_n, attained at the centre.
    const double sup = m.sup_on(w);
    EXPECT_NEAR(sup, m.pieces[0].coefficient, 1e-15);
    // Order-0 condition against φ with 1 + |ln t|: a_n/φ(2^{-n}) = ((1 + n ln 2)/n)^b ≤ (1 + ln 2)^b.
    const double bound = std::pow(1 + std::log(2.0), log_exponent(kParams));
    EXPECT_LE(sup / phi_weight_abs(dist, kParams), bound + 1e-12);
  }
}

TEST(BuildSymbol, PiecesSumAndSupport) {
  const RoughSymbol m = build_symbol(experiment_disc(), disc_cover(5), kParams);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.2, 2.2);
  for (int k = 0; k < 2000; ++k) {
    const double xi = u(rng), eta = u(rng);
    EXPECT_NEAR(m(xi, eta), m.evaluate_all(xi, eta), 1e-15);
  }
  for (std::size_t i = 0; i < m.pieces.size(); i += 7) {
    const FrequencySquare& w = m.pieces[i].square;
    const Interval a = w.omega1.interval().dilate(1.1), b = w.omega2.interval().dilate(1.1);
    const double c2 = w.omega2.center();
    EXPECT_EQ(m.piece(i, a.hi, c2), 0.0);
    EXPECT_EQ(m.piece(i, a.lo - 1e-12, c2), 0.0);
    EXPECT_EQ(m.piece(i, w.omega1.center(), b.hi), 0.0);
    EXPECT_GT(m.piece(i, w.omega1.center(), c2), 0.0);
  }
  for (double xi : {-3.0, 2.5, 0.0})
    for (double eta : {-3.0, 2.5}) EXPECT_EQ(m(xi, eta), 0.0);
}

TEST(BuildSymbol, ShellSupDecay) {
  const RoughSymbol m = build_symbol(experiment_disc(), disc_cover(7), kParams);
  std::vector<double> xs, ys;
  for (const auto& [n, sup] : shell_sup(m)) {
    if (n < 1) continue;
    xs.push_back(n);
    ys.push_back(std::log2(sup * std::pow(n, log_exponent(kParams))));
  }
  ASSERT_GE(xs.size(), 4u);
  double mx = 0, my = 0, sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / ys.size();
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  const double slope = sxy / sxx, want = -1.0 / kParams.r_prime();
  std::cout << "[ measured ] shell sup slope " << slope << " (model " << want << ")\n";
  EXPECT_NEAR(slope, want, 0.2 * std::abs(want));
}

// ------------------------------------------------------------ shell factor

TEST(ShellFactor, OneSquareClosedForm) {
  for (int n : {1, 2, 5}) {
    const double want = std::pow(std::exp2(-n) * std::pow(n, -1.0 - kParams.r_prime() * kParams.eps), 0.75);
    EXPECT_NEAR(shell_factor({{n, 1}}, kParams), want, 1e-15);
    // The same number as the single coefficient a_n.
    EXPECT_NEAR(shell_factor({{n, 1}}, kParams), shell_coefficient(n, kParams), 1e-15);
  }
  // n = 0 is merged into n = 1.
  EXPECT_DOUBLE_EQ(shell_factor({{0, 1}}, kParams), shell_factor({{1, 1}}, kParams));
}

TEST(ShellFactor, DecreasesInEpsilon) {
  const auto counts = shell_counts(disc_cover(8), experiment_disc());
  double prev = kInf;
  for (double eps : {0.05, 0.1, 0.25, 0.5, 1.0}) {
    const double f = shell_factor(counts, {4.0, eps, 1});
    EXPECT_LT(f, prev);
    prev = f;
  }
}

TEST(ShellFactor, TailBeyondTenIsSmall) {
  const auto counts = shell_counts(disc_cover(12), experiment_disc());
  const auto partial = shell_partial_sums(counts, kParams);
  const double total = partial.back().second;
  double upto10 = 0;
  for (const auto& [n, s] : partial)
    if (n <= 10) upto10 = s;
  std::cout << "[ measured ] tail fraction beyond n = 10: " << 1 - upto10 / total << "\n";
  EXPECT_LT(1 - upto10 / total, 0.10);
  EXPECT_NEAR(std::pow(total, 0.75), shell_factor(counts, kParams), 1e-12);
}

TEST(ShellCounts, DiscScaling) {
  const auto counts = shell_counts(disc_cover(12), experiment_disc());
  const ShellFit fit = fit_shell_counts(counts, 2, 11);
  std::cout << "[ measured ] shell slope " << fit.slope << " max #Ω_n/2^n " << fit.max_ratio << "\n";
  EXPECT_GE(fit.slope, 0.7);
  EXPECT_LE(fit.slope, 1.3);
  EXPECT_LE(fit.max_ratio, kRegression * calibrated::kShellCount);
}

// ------------------------------------------------------------ domination

TEST(LrDomination, SinglePieceIsEquality) {
  const OpenRegion region = OpenRegion::open_square(0, 0, 1);
  const RoughSymbol m = build_symbol(region, SquareCollection({FrequencySquare(-2, 1, 2)}), kParams);
  std::mt19937_64 rng(5);
  const SampledFunction f = random_bandlimited(kGrid, {-1, 2}, rng), g = random_bandlimited(kGrid, {-1, 2}, rng);
  const Domination d = lr_domination(f, g, m);
  EXPECT_NEAR(d.factor, m.pieces[0].coefficient, 1e-15);
  double scale = 0;
  for (std::size_t i = 0; i < kGrid.n; ++i) scale = std::max(scale, d.rhs[i].real());
  EXPECT_GT(scale, 0);
  for (std::size_t i = 0; i < kGrid.n; ++i) EXPECT_NEAR(d.lhs[i].real(), d.rhs[i].real(), 1e-12 * scale);
}

TEST(LrDomination, ZeroInputs) {
  const RoughSymbol m = build_symbol(experiment_disc(), disc_cover(4), kParams);
  std::mt19937_64 rng(7);
  const SampledFunction f = random_bandlimited(kGrid, {-3, 3}, rng);
  for (const auto& d : {lr_domination(f, SampledFunction(kGrid), m), lr_domination(SampledFunction(kGrid), f, m)})
    for (std::size_t i = 0; i < kGrid.n; ++i) {
      EXPECT_EQ(d.lhs[i].real(), 0.0);
      EXPECT_EQ(d.rhs[i].real(), 0.0);
    }
}

TEST(LrDomination, DiscPointwiseAndPipeline) {
  const RoughSymbol m = build_symbol(experiment_disc(), disc_cover(6), kParams);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    const SampledFunction f = random_bandlimited(kGrid, {-3, 3}, rng), g = random_bandlimited(kGrid, {-3, 3}, rng);
    const Domination d = lr_domination(f, g, m);
    EXPECT_TRUE(d.holds(1e-8)) << d.max_excess;
    // Second path: the operators module's T_r over the cover, times the factor.
    const SampledFunction tr = eval_T_r(f, g, m.cover, kParams.r, false);
    for (std::size_t i = 0; i < kGrid.n; ++i)
      EXPECT_NEAR(tr[i].real() * shell_factor(m.cover, experiment_disc(), kParams), d.rhs[i].real(),
                  1e-12 * (1 + d.rhs[i].real()));
  }
}

// ------------------------------------------------------------ export

TEST(Export, RoundTrip) {
  const RoughSymbol m = build_symbol(experiment_disc(), disc_cover(3), kParams);
  std::istringstream is(export_symbol(m));
  std::size_t lines = 0;
  int j;
  std::int64_t k1, k2;
  double c;
  while (is >> j >> k1 >> k2 >> c) {
    ASSERT_LT(lines, m.pieces.size());
    EXPECT_EQ(FrequencySquare(j, k1, k2), m.pieces[lines].square);
    EXPECT_DOUBLE_EQ(c, m.pieces[lines].coefficient);
    ++lines;
  }
  EXPECT_EQ(lines, m.pieces.size());
  const std::string csv = shell_histogram_csv(m.shell_counts);
  EXPECT_EQ(csv.substr(0, 8), "n,count\n");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), m.shell_counts.size() + 1);
}
