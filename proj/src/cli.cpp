#include "emunet/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <iostream>

#include "emunet/errors.hpp"
#include "emunet/pipeline.hpp"

namespace emunet {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;
constexpr int kExitValidation = 4;

int run_stage(const std::string& name, const std::string& config_path,
              const std::string& outdir, std::uint64_t* seed_override) {
  PipelineConfig config = load_config(config_path);
  if (seed_override) config.seed = *seed_override;
  config.validate();

  PipelineContext ctx = open_context(std::move(config), outdir);
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  if (name == "design")
    stage_design(ctx);
  else if (name == "run-ensemble")
    stage_run_ensemble(ctx);
  else if (name == "fit")
    stage_fit(ctx);
  else if (name == "validate")
    ok = stage_validate(ctx);
  else if (name == "link")
    stage_link(ctx);
  else if (name == "project")
    stage_project(ctx);
  else if (name == "compare")
    ok = stage_compare(ctx);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ctx.manifest.record_timing(name, seconds);
  close_context(ctx);
  return ok ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"emunet: linked Gaussian-process emulation of an energy-planning model chain"};
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "pipeline config json (defaults used when omitted)");
  app.add_option("--out", outdir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
    seed_set = true;
  });

  const std::vector<std::pair<std::string, std::string>> stages = {
      {"design", "generate maximin LHC training designs and uniform test designs"},
      {"run-ensemble", "evaluate the simulators at the design points"},
      {"fit", "build PC bases and fit per-coefficient GP emulators"},
      {"validate", "held-out cross-validation with 2sd coverage thresholds"},
      {"link", "assemble the feed-forward emulator network"},
      {"project", "emit linked / composed / MC cost projections at the query point"},
      {"compare", "check linked-vs-composed sd ratios and MC agreement"},
  };
  for (const auto& [name, desc] : stages) app.add_subcommand(name, desc);

  std::vector<const char*> argv;
  argv.push_back("emunet");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    return run_stage(app.get_subcommands().front()->get_name(), config_path, outdir,
                     seed_set ? &seed : nullptr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MissingArtifactError& e) {
    std::cerr << "missing artifact: " << e.what() << "\n";
    return kExitMissing;
  } catch (const ValidationError& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace emunet
