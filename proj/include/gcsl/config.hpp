#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gcsl/env.hpp"
#include "gcsl/policy.hpp"
#include "gcsl/trainer.hpp"

namespace gcsl {

// Everything a run needs, parsed from a flat key=value config file with
// dotted keys plus CLI overrides. Unknown keys are rejected.
struct RunConfig {
  std::string env_name = "grid-rooms";
  EnvParams env_params;

  std::string policy_kind = "auto";  // "tabular" | "mlp" | "auto" (by env type)
  std::vector<int> hidden = {400, 300};
  bool time_varying = false;
  double smoothing = 0.1;

  TrainConfig train;

  std::unique_ptr<Env> make_environment() const;
  // Policy construction is deterministic in train.seed (init stream is split
  // off the same root as the training streams).
  std::unique_ptr<Policy> make_policy(const Env& env) const;

  // key -> value snapshot of every setting, for the run manifest
  std::map<std::string, std::string> items() const;
};

// The shipped hyperparameters for each built-in environment; anything a
// config file or --set override names wins over these.
RunConfig default_run_config(const std::string& env_name);

// Throws std::invalid_argument on unknown keys or malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
// Throws std::runtime_error naming the path when the file cannot be read.
RunConfig load_config_file(const std::string& path);
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& key_value_pairs);

}  // namespace gcsl
