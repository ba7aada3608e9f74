#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include <bergman_lab/bergman_lab.hpp>

namespace bl = bergman_lab;

int main(int argc, char** argv) {
  CLI::App app{"Bergman-space composition operator lab"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
  std::string run_path;
  std::string out_prefix;
  run->add_option("config", run_path, "config file")->required();
  run->add_option("-o,--output", out_prefix, "output path prefix (overrides the config)");

  auto* list = app.add_subcommand("list", "list the experiment catalog");

  auto* validate = app.add_subcommand("validate", "parse and validate a config without running it");
  std::string validate_path;
  validate->add_option("config", validate_path, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& name : bl::experiment_names()) {
        std::cout << name << "\t" << bl::experiment_summary(name) << "\n";
      }
      return 0;
    }
    if (*validate) {
      const auto cfg = bl::load_config(validate_path);
      std::cout << cfg.resolved.dump(2) << "\n";
      return 0;
    }
    const auto cfg = bl::load_config(run_path);
    std::string prefix = out_prefix.empty() ? cfg.output : out_prefix;
    if (prefix.empty()) prefix = std::filesystem::path(run_path).stem().string();
    const auto parent = std::filesystem::path(prefix).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    const auto result = bl::run_experiment(cfg);
    for (const auto& path : bl::write_outputs(result, prefix)) std::cout << path << "\n";
    return result.ok ? 0 : 3;
  } catch (const bl::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
