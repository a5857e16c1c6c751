#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mwshape/commands.hpp"
#include "mwshape/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matter-wave shaping: propagate, optimize and analyse shaped-potential runs"};
  app.set_version_flag("--version", mwshape::version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> resolution;

  const std::pair<const char*, const char*> commands[] = {
      {"propagate", "Run one propagation and write observables and density maps"},
      {"optimize", "Optimize the free potential parameters for the task"},
      {"sensitivity", "Perturb each parameter by +-fraction and report the target change"},
      {"sweep-density", "Focus the packet at a list of BEC densities"},
      {"ground-state", "Imaginary-time ground state (1D or cylindrical)"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Run configuration (key = value, [sections])")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed for optimizer restarts");
    sub->add_option("--resolution", resolution, "Grid preset")->check(CLI::IsMember({"search", "full"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    mwshape::ConfigEntries entries = mwshape::read_config_entries(config_path);
    if (resolution) entries["resolution"] = {*resolution};
    else if (command == "optimize" && !entries.count("resolution")) entries["resolution"] = {"search"};
    if (seed) entries["seed"] = {std::to_string(*seed)};
    const mwshape::RunConfig config = mwshape::parse_config(entries);
    const auto result = mwshape::run_command(command, config, out_dir);
    std::cout << result.summary << "\n";
    for (const auto& f : result.files) std::cout << "wrote " << (std::filesystem::path(out_dir) / f).string() << "\n";
    return kOk;
  } catch (const mwshape::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mwshape::ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mwshape::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const mwshape::DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}
