#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "tfa/experiment.hpp"

using namespace tfa;
using namespace tfa::experiment;

namespace {

ConfigError config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return ConfigError(-1, "", "");
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / ("tfa_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

// ------------------------------------------------------------ config

TEST(Config, ParsesAllFieldsWithComments) {
  const ExperimentConfig c = parse_config_text(
      "# probe run\n"
      "kind = probe-sweep\n"
      "\n"
      "grid.n = 2048   # trailing comment\n"
      "grid.period=16\n"
      "seed = 42\n"
      "omega.generator = random-disjoint\n"
      "omega.count = 5\n"
      "omega.extent = 4\n"
      "omega.orientation = xi-strip\n"
      "p = 2.5\n"
      "q = 3\n"
      "r = 6\n"
      "sizes = 1, 2,4\n"
      "p_grid = 1.5,2\n"
      "setups = 3\n");
  EXPECT_EQ(c.kind, "probe-sweep");
  EXPECT_EQ(c.grid_n, 2048u);
  EXPECT_EQ(c.grid_period, 16.0);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.omega_generator, "random-disjoint");
  EXPECT_EQ(c.omega.count, 5u);
  EXPECT_EQ(c.omega.extent, 4.0);
  EXPECT_EQ(c.omega.orientation, StripOrientation::xi);
  EXPECT_EQ(c.p, 2.5);
  EXPECT_EQ(c.q, 3.0);
  EXPECT_EQ(c.r, 6.0);
  EXPECT_EQ(c.sizes, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(c.p_grid, (std::vector<double>{1.5, 2}));
  EXPECT_EQ(c.setups, 3u);
  const Grid g = suite_grid(c);
  EXPECT_EQ(g.n, 2048u);
  EXPECT_EQ(g.period, 16.0);
}

TEST(Config, DefaultsPerSuite) {
  EXPECT_EQ(suite_grid(parse_config_text("kind = model-oracle")).n, 256u);
  EXPECT_EQ(suite_grid(parse_config_text("kind = probe-sweep")).n, probe_grid().n);
  EXPECT_EQ(suite_grid(parse_config_text("kind = column-suite")).n, kTileGrid.n);
  EXPECT_EQ(parse_config_text("").seed, 1u);
}

TEST(Config, ErrorsCarryLineAndField) {
  auto e = config_error("kind = rf-baseline\ngrid.n = 1000\n");
  EXPECT_EQ(e.line, 2);
  EXPECT_EQ(e.field, "grid.n");

  e = config_error("\n\nwhat = 3\n");
  EXPECT_EQ(e.line, 3);
  EXPECT_EQ(e.field, "what");

  e = config_error("kind = rf-baseline\nno equals sign\n");
  EXPECT_EQ(e.line, 2);
  EXPECT_EQ(e.field, "");

  e = config_error("seed = 1\nseed = 2\n");
  EXPECT_EQ(e.line, 2);
  EXPECT_EQ(e.field, "seed");

  EXPECT_EQ(config_error("p = 3x").field, "p");
  EXPECT_EQ(config_error("p = 0.5").field, "p");
  EXPECT_EQ(config_error("r = 1.5").field, "r");
  EXPECT_EQ(config_error("kind = fourier").field, "kind");
  EXPECT_EQ(config_error("omega.generator = spiral").field, "omega.generator");
  EXPECT_EQ(config_error("omega.orientation = diagonal").field, "omega.orientation");
  EXPECT_EQ(config_error("sizes = 1,,2").field, "sizes");
  EXPECT_EQ(config_error("sizes = 0").field, "sizes");
  EXPECT_EQ(config_error("grid.period = -1").field, "grid.period");
  EXPECT_EQ(config_error("omega.file = /no/such/file").field, "omega.file");
  EXPECT_EQ(config_error("grid.n =").field, "grid.n");
  EXPECT_NE(config_error("grid.n = 3").diagnostic("x.cfg").find("x.cfg:1: grid.n:"), std::string::npos);
}

TEST(Config, OmegaFileIsResolvedAgainstConfigDir) {
  const auto dir = temp_dir("omega_file");
  std::ofstream(dir / "omega.txt") << "# two squares\n0 1 2\n-1 0 0\n";
  std::ofstream(dir / "run.cfg") << "kind = model-oracle\nomega.file = omega.txt\n";
  const ExperimentConfig c = load_config(dir / "run.cfg");
  const auto omega = configured_omega(c, suite_grid(c));
  ASSERT_TRUE(omega);
  ASSERT_EQ(omega->size(), 2u);
  EXPECT_EQ((*omega)[0], FrequencySquare(0, 1, 2));
  EXPECT_EQ((*omega)[1], FrequencySquare(-1, 0, 0));

  std::ofstream(dir / "both.cfg") << "omega.file = omega.txt\nomega.generator = random-disjoint\n";
  EXPECT_THROW(load_config(dir / "both.cfg"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.cfg"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Config, OmegaFileRoundTripAndRejects) {
  std::mt19937_64 rng(3);
  const SquareCollection omega = random_squares(rng, 10);
  std::istringstream in(write_omega(omega));
  EXPECT_EQ(read_omega(in).squares(), omega.squares());
  std::istringstream bad("0 1\n");
  EXPECT_THROW(read_omega(bad), ConfigError);
  std::istringstream overlap("0 0 0\n-1 0 1\n");
  EXPECT_THROW(read_omega(overlap), std::invalid_argument);
}

// ------------------------------------------------------------ generate_omega

TEST(GenerateOmega, ZeroCountIsEmpty) {
  OmegaParams p;
  p.count = 0;
  EXPECT_TRUE(generate_omega("random-disjoint", p, 1, kTileGrid).empty());
}

TEST(GenerateOmega, RandomDisjointCount32) {
  OmegaParams p;
  p.count = 32;
  const SquareCollection omega = generate_omega("random-disjoint", p, 1, kTileGrid);
  ASSERT_EQ(omega.size(), 32u);
  // Independent disjointness oracle: interval arithmetic on every pair.
  for (std::size_t i = 0; i < omega.size(); ++i)
    for (std::size_t j = i + 1; j < omega.size(); ++j) {
      const Interval a1 = omega[i].omega1.interval(), a2 = omega[i].omega2.interval();
      const Interval b1 = omega[j].omega1.interval(), b2 = omega[j].omega2.interval();
      const bool overlap = a1.lo < b1.hi && b1.lo < a1.hi && a2.lo < b2.hi && b2.lo < a2.hi;
      EXPECT_FALSE(overlap) << i << ' ' << j;
    }
  for (const auto& w : omega) {
    EXPECT_GE(w.omega1.interval().lo, 0.0);
    EXPECT_LE(w.omega2.interval().hi, p.extent);
  }
}

TEST(GenerateOmega, DeterministicUnderSeed) {
  OmegaParams p;
  p.count = 20;
  EXPECT_EQ(generate_omega("random-disjoint", p, 5, kTileGrid).squares(),
            generate_omega("random-disjoint", p, 5, kTileGrid).squares());
  EXPECT_NE(generate_omega("random-disjoint", p, 5, kTileGrid).squares(),
            generate_omega("random-disjoint", p, 6, kTileGrid).squares());
}

TEST(GenerateOmega, FailsWhenCountCannotBePlaced) {
  OmegaParams p;
  p.count = 1000;  // at most 256 squares of side 1/2 fit in [0, 8)²
  EXPECT_THROW(generate_omega("random-disjoint", p, 1, kTileGrid), std::runtime_error);
}

TEST(GenerateOmega, RejectsBeyondNyquist) {
  OmegaParams p;
  p.extent = 64;
  EXPECT_THROW(generate_omega("random-disjoint", p, 1, kTileGrid), std::invalid_argument);
  p.radius = 100;
  EXPECT_THROW(generate_omega("whitney-disc", p, 1, kTileGrid), std::invalid_argument);
  EXPECT_THROW(generate_omega("spiral", p, 1, kTileGrid), std::invalid_argument);
}

TEST(GenerateOmega, AlignedStripEight) {
  OmegaParams p;
  p.n = 8;
  p.orientation = StripOrientation::eta;
  const SquareCollection omega = generate_omega("aligned-strip", p, 1, probe_grid());
  ASSERT_EQ(omega.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(omega[k], FrequencySquare(0, static_cast<std::int64_t>(k), 0));
  p.orientation = StripOrientation::xi;
  const SquareCollection xi = generate_omega("aligned-strip", p, 1, probe_grid());
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(xi[k], FrequencySquare(0, 0, static_cast<std::int64_t>(k)));
}

TEST(GenerateOmega, WhitneyDiscMatchesCover) {
  OmegaParams p;
  p.depth = 4;
  EXPECT_EQ(generate_omega("whitney-disc", p, 1, Grid(1024, 64.0)).squares(),
            whitney_cover(OpenRegion::disc(0, 0, 2), 4).squares());
}

// ------------------------------------------------------------ oracles

TEST(Oracles, DftInvertsOnBandlimited) {
  const Grid g(64, 4.0);
  std::mt19937_64 rng(1);
  const SampledFunction f = random_bandlimited(g, {-2, 3}, rng);
  const oracle::DirectSpectrum F = oracle::dft(f);
  EXPECT_LT(oracle::rel_error(oracle::linear(F, [](double) { return 1.0; }), f), 1e-12);
  for (auto k : F.index) {
    EXPECT_GE(double(k) / g.period, -2 - 1e-12);
    EXPECT_LT(double(k) / g.period, 3 + 1e-12);
  }
}

TEST(Oracles, PacketHasUnitNorm) {
  const Grid g(256, 8.0);
  const TriTile s = build_tritile(make_dyadic(0, 1), FrequencySquare(0, 1, 2));
  for (int j = 1; j <= 3; ++j) EXPECT_NEAR(l2_norm(oracle::packet(g, s, j)), 1.0, 1e-12);
}

// ------------------------------------------------------------ suites

TEST(Suites, SmallRunsPass) {
  for (const std::string text : {"kind = rf-baseline\ninstances = 3\n", "kind = model-oracle\ninstances = 2\n",
                                 "kind = column-suite\ninstances = 5\n", "kind = energy-suite\ninstances = 5\n",
                                 "kind = decompose-suite\ninstances = 6\nseed = 7\n", "kind = split-suite\ninstances = 4\n",
                                 "kind = counterexample\nsizes = 4, 8\n",
                                 "kind = probe-sweep\nsizes = 1, 4\nsetups = 2\nomega.generator = random-disjoint\nomega.count = 4\n",
                                 "kind = bochner\ninstances = 2\nomega.generator = whitney-disc\nomega.depth = 3\nshell_depth = 10\n"}) {
    const SuiteResult r = run_suite(parse_config_text(text));
    EXPECT_TRUE(r.passed()) << text << (r.failures.empty() ? "" : r.failures.front());
    EXPECT_FALSE(r.artifacts.empty()) << text;
  }
}

TEST(Suites, DecomposeReportMatchesGolden) {
  std::ifstream in(std::string(TFA_GOLDEN_DIR) + "/decompose_seed7.txt");
  ASSERT_TRUE(in);
  const std::string want((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(decomposition_report(7, 4.0), want);
  ExperimentConfig c = parse_config_text("kind = decompose-suite\ninstances = 1\nseed = 7\n");
  c.golden = std::string(TFA_GOLDEN_DIR) + "/decompose_seed7.txt";
  EXPECT_TRUE(run_suite(c).passed());
  c.seed = 8;
  const SuiteResult other = run_suite(c);
  ASSERT_FALSE(other.passed());
  EXPECT_NE(other.failures.back().find("differs from golden"), std::string::npos);
}

TEST(Suites, ModuleErrorsBecomeFailures) {
  const SuiteResult r = run_suite(parse_config_text("kind = probe-sweep\nsizes = 1, 500\n"));
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_NE(r.failures[0].find("exceeds"), std::string::npos);
  EXPECT_THROW(run_suite(parse_config_text("")), ConfigError);
}

TEST(Suites, ThresholdViolationIsReported) {
  // Inside the bounded region (p = 3) the strip ratio decays in N.
  const SuiteResult r = run_suite(parse_config_text("kind = counterexample\np = 3\nsizes = 4, 16, 64\n"));
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.failures.front(), "ratio is not monotone in N");
  EXPECT_EQ(r.stats["monotone"], false);
}

// ------------------------------------------------------------ output

TEST(Output, ByteIdenticalReruns) {
  const auto a = temp_dir("det_a"), b = temp_dir("det_b");
  const ExperimentConfig c = parse_config_text("kind = decompose-suite\ninstances = 4\nseed = 11\n");
  write_outputs(run_suite(c), a);
  write_outputs(run_suite(c), b);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
  }
  EXPECT_EQ(files, 3u);  // csv, report, summary
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Output, SummaryListsFailuresAndLeavesNoTempFiles) {
  const auto d = temp_dir("summary");
  SuiteResult r("split-suite", 3);
  r.failures = {"instance 0: x", "instance 2: y"};
  r.artifacts["a.csv"] = "h\n1\n";
  write_outputs(r, d);
  const auto j = nlohmann::json::parse(slurp(d / "summary.json"));
  EXPECT_EQ(j["schema"], kSummarySchema);
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(j["passed"], false);
  EXPECT_EQ(j["failures"].size(), 2u);
  EXPECT_EQ(j["artifacts"][0], "a.csv");
  EXPECT_EQ(slurp(d / "a.csv"), "h\n1\n");
  for (const auto& e : std::filesystem::directory_iterator(d))
    EXPECT_EQ(e.path().filename().string().find(".tmp."), std::string::npos);
  write_atomic(d / "a.csv", "replaced\n");
  EXPECT_EQ(slurp(d / "a.csv"), "replaced\n");
  std::filesystem::remove_all(d);
}
