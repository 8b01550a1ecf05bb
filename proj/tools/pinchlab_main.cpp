// Command-line experiment runner.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pinchlab/errors.hpp"
#include "pinchlab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pinching orbit experiments: runs a check suite and emits a JSON or CSV report."};
  app.option_defaults()->always_capture_default();

  std::string config_path;
  pinchlab::ConfigMap flags;
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags[key] = {v, 0}; }, help);
  };
  flag("--command", "command", "verify | fiber | section | distance | topology-gap | normal-orbit | lipschitz");
  flag("--dim", "dim", "ambient dimension n");
  flag("--norm", "norm", "op | s1 | s2 | sp:<p> | kyfan:<k>");
  flag("--blocks", "blocks", "comma-separated block ranks, e.g. 1,2");
  flag("--seed", "seed", "base seed");
  flag("--trials", "trials", "random trials per check");
  flag("--k-max", "k_max", "largest k in the topology-gap table");
  flag("--out", "out", "output path (default: stdout)");
  flag("--format", "format", "json | csv");
  app.add_flag_callback("--timing", [&flags] { flags["timing"] = {"true", 0}; },
                        "include wall-clock seconds (makes output non-deterministic)");
  app.add_option("--config", config_path, "key=value file; flags override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    std::vector<pinchlab::ConfigMap> layers;
    if (!config_path.empty()) layers.push_back(pinchlab::load_config_file(config_path));
    layers.push_back(flags);
    const pinchlab::ExperimentConfig cfg = pinchlab::build_config(layers);
    const pinchlab::Report report = pinchlab::run(cfg);
    const std::string bytes = pinchlab::emit(report, cfg.format);
    if (cfg.out.empty()) {
      std::cout << bytes;
    } else {
      pinchlab::write_file(cfg.out, bytes);
    }
    std::cerr << report.passed() << " passed, " << report.failed() << " failed\n";
    return report.all_pass() ? 0 : 1;
  } catch (const pinchlab::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const pinchlab::Error& e) {
    std::cerr << e.what() << '\n';
    return 3;
  }
}
