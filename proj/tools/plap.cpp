// plap <subcommand> --config <file> --out <dir> [--parallel] [--seed N]
//
// exit: 0 all checks pass, 1 a check failed, 2 config or usage error

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "plap/campaign.hpp"
#include "plap/config.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-Laplace verification campaigns"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  bool parallel = false;
  std::optional<std::uint64_t> seed;

  app.add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory for CSV artifacts and the report");
  app.add_flag("--parallel", parallel, "run independent steps concurrently");
  app.add_option("--seed", seed, "seed for randomized sweeps (overrides the config)");

  for (const auto& name : plap::subcommands()) app.add_subcommand(name, "run the " + name + " campaign");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    plap::configure_logging();
    const std::string sub = app.get_subcommands().front()->get_name();
    auto cfg = plap::ExperimentConfig::load(config_path, sub);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (cfg.out.empty()) throw plap::Error(plap::ErrorKind::Config, "no output directory (--out or config.out)");
    if (seed) cfg.seed = *seed;
    cfg.parallel = cfg.parallel || parallel;

    const auto report = plap::run(cfg);
    std::cout << report.rows.size() - report.failures() << "/" << report.rows.size() << " checks passed ("
              << cfg.out << "/report.csv)\n";
    return report.all_pass() ? kPass : kCheckFailure;
  } catch (const plap::Error& e) {
    std::cerr << "plap: " << e.what() << "\n";
    return e.kind() == plap::ErrorKind::Config ? kUsage : kCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "plap: " << e.what() << "\n";
    return kCheckFailure;
  }
}
