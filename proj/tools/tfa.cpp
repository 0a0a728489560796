// tfa <kind> --config <path> [--seed k] [--out dir]

#include <iostream>

#include <CLI11.hpp>

#include "tfa/experiment.hpp"

namespace ex = tfa::experiment;

int main(int argc, char** argv) {
  CLI::App app{"Time-frequency experiment runner"};
  std::string kind, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("kind", kind, "Suite to run")->required()->check(CLI::IsMember(ex::kKinds));
  app.add_option("--config", config_path, "key = value config file")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", out_dir, "Output directory (default: out/<kind>)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), ex::kExitConfig);
  }

  ex::ExperimentConfig cfg;
  try {
    cfg = ex::load_config(config_path);
    if (cfg.kind.empty()) cfg.kind = kind;
    if (cfg.kind != kind) throw ex::ConfigError(0, "kind", "config is for '" + cfg.kind + "', not '" + kind + "'");
    if (seed) cfg.seed = *seed;
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.diagnostic(config_path) << '\n';
    return ex::kExitConfig;
  }

  const ex::SuiteResult res = ex::run_suite(cfg);
  const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path("out") / kind : std::filesystem::path(out_dir);
  try {
    ex::write_outputs(res, dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot write outputs: " << e.what() << '\n';
    return ex::kExitFail;
  }
  std::cout << kind << " seed=" << res.seed << ' ' << (res.passed() ? "PASS" : "FAIL") << " -> " << dir.string() << '\n';
  for (const auto& f : res.failures) std::cout << "  " << f << '\n';
  return res.passed() ? ex::kExitPass : ex::kExitFail;
}
