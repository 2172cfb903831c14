#include "fraclb/config.hpp"
#include "fraclb/errors.hpp"
#include "fraclb/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

int run(const std::string& path) {
  const fraclb::RunConfig config = fraclb::load_config(path);
  const fraclb::ExperimentResult result = fraclb::run_experiment(config);
  const char* env = std::getenv("FRACLB_OUTPUT_ROOT");
  const std::string dir = fraclb::write_artifacts(config, result, env ? env : ".");
  std::cout << "experiment " << result.experiment << '\n';
  for (const fraclb::Check& c : result.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << ' ' << c.relation << ' '
              << c.limit << '\n';
  for (const std::string& n : result.notes) std::cout << "note: " << n << '\n';
  std::cout << "artifacts in " << dir << '\n';
  std::cout << (result.passed() ? "PASS" : "FAIL") << '\n';
  return result.passed() ? 0 : 1;
}

void list() {
  std::cout << "experiment\tdescription\tkeys\n";
  for (const auto& e : fraclb::experiment_catalog())
    std::cout << e.name << '\t' << e.description << '\t' << e.keys << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Laplace-Beltrami experiments on a periodic grid"};
  app.require_subcommand(1);
  std::string path;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("config", path, "config file")->required();
  auto* list_cmd = app.add_subcommand("list", "List experiments");
  auto* version_cmd = app.add_subcommand("version", "Print the library version");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (*run_cmd) return run(path);
    if (*list_cmd) list();
    if (*version_cmd) std::cout << "fraclb " << fraclb::library_version() << '\n';
    return 0;
  } catch (const fraclb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
