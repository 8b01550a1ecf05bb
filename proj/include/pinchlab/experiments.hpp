#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pinchlab/norms.hpp"
#include "pinchlab/pinching.hpp"
#include "pinchlab/random.hpp"
#include "pinchlab/report.hpp"

namespace pinchlab {

inline const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> commands = {"verify",       "fiber",        "section",  "distance",
                                                    "topology-gap", "normal-orbit", "lipschitz"};
  return commands;
}

struct ExperimentConfig {
  std::string command = "verify";
  int dim = 6;
  std::string norm = "s1";
  std::vector<int> blocks = {1, 2};
  std::uint64_t seed = 42;
  int trials = 20;
  int k_max = 8;
  std::string out;  // empty: stdout
  Format format = Format::Json;
  bool timing = false;

  /// Throws ConfigError on any invariant violation.
  void validate() const;
  ConfigEcho echo() const;
};

/// Raw key=value settings, remembering the source line of each key.
struct ConfigEntry {
  std::string value;
  int line = 0;  // 0 for command-line flags
};
using ConfigMap = std::map<std::string, ConfigEntry>;

/// Parses key=value lines; '#' starts a comment. Throws ConfigError with the line number.
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

/// Applies settings in order (later maps win) and validates the result.
ExperimentConfig build_config(const std::vector<ConfigMap>& layers);

std::vector<int> parse_blocks(const std::string& s);

/// Worker count from PINCHLAB_THREADS (default 1).
int thread_count();

/// Runs fn(i) for i in [0, count) on up to thread_count() threads; results must be
/// written to per-index slots so the outcome does not depend on scheduling.
void parallel_for(int count, const std::function<void(int)>& fn);

/// Family with the given block sizes, frames taken from a Haar unitary.
ProjectionFamily random_family(Rng& rng, Eigen::Index n, const std::vector<int>& sizes);
/// Random block sizes summing to at most n (at least one block).
std::vector<int> random_sizes(Rng& rng, Eigen::Index n, bool allow_complement = true);

/// Runs the configured suite. Deterministic for a fixed configuration.
Report run(const ExperimentConfig& cfg);

}  // namespace pinchlab
