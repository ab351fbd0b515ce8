#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "cli/runner.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitRunFailed = 3;

void print_diagnostics(const std::vector<nvmag::cli::Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << (d.path.empty() ? "<config>" : d.path) << ": " << d.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nvmag::cli;

  CLI::App app{"NV-ensemble magnetometry simulation and analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  for (const char* name : {"simulate", "filter", "odmr", "pulsed", "widefield", "report"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario");
    sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override rng_seed");
    sub->add_option("--out", out_dir, "override output_dir");
  }
  auto* validate = app.add_subcommand("validate", "check a configuration without running it");
  validate->add_option("--config", config_path, "run configuration (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();

  if (name == "validate") {
    const LoadResult r = load_config(config_path);
    print_diagnostics(r.diagnostics);
    if (!r.ok()) return kExitInvalidConfig;
    std::cout << "ok: " << to_string(r.config.scenario) << '\n';
    return 0;
  }

  Overrides overrides;
  overrides.scenario = parse_scenario(name);
  overrides.seed = seed;
  if (out_dir) overrides.output_dir = std::filesystem::path(*out_dir);
  const LoadResult r = load_config(config_path, overrides);
  if (!r.ok()) {
    print_diagnostics(r.diagnostics);
    return kExitInvalidConfig;
  }
  try {
    for (const auto& path : run(r.config)) std::cout << path.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunFailed;
  }
  return 0;
}
