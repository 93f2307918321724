#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace kpt {

// Anything wrong with user input: unknown keys, bad values, missing files.
// The CLI maps this to its configuration exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value experiment description. Every knob has a default, so an
// empty config is runnable; unknown keys are rejected rather than ignored.
struct ExperimentConfig {
  std::string pair = "perm";  // perm | easy | overlap
  int n = 10;
  uint64_t perm_seed = 0;
  int hard_bit = 0;

  int m = 6;
  int k = 2;
  long games = 1000;
  std::string student = "omniscient";
  int probe = 1;
  int constant_index = 0;

  long estimation_samples = 0;  // 0 = Hoeffding default for tau/2
  int advice_candidates = 40;
  long advantage_samples = 4000;
  double tau = 0;  // 0 = 1/(4m)
  double confidence = 0.99;

  uint64_t seed = 1;
  int workers = 0;  // 0 = decide from env or default to 1
};

// Applies one "key=value" assignment; throws ConfigError on unknown keys or
// unparsable values.
void apply_assignment(ExperimentConfig&, const std::string& assignment);

// Lines of key=value; '#' starts a comment, blank lines are skipped.
ExperimentConfig parse_config_text(const std::string& text);

ExperimentConfig load_config(const std::optional<std::string>& path,
                             const std::vector<std::string>& overrides);

nlohmann::ordered_json config_json(const ExperimentConfig&);

// Stable across runs and platforms: hash of the canonical serialization.
uint64_t config_hash(const ExperimentConfig&);

}  // namespace kpt
