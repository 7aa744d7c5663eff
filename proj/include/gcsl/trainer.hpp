#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gcsl/buffer.hpp"
#include "gcsl/env.hpp"
#include "gcsl/eval.hpp"
#include "gcsl/policy.hpp"
#include "gcsl/rng.hpp"

namespace gcsl {

enum class Ablation { none, time_varying, limited_relabel, on_policy, fixed_collection };
enum class CollectMode { uniform, greedy, sampled };

Ablation ablation_from_string(const std::string& s);
std::string to_string(Ablation a);
CollectMode collect_mode_from_string(const std::string& s);
std::string to_string(CollectMode m);

struct TrainConfig {
  long long total_env_steps = 200000;
  long long warmup_steps = 10000;  // uniform-action collection, no updates
  int batch_size = 256;
  int grad_steps_per_env_step = 1;
  long long eval_every = 10000;
  Ablation ablation = Ablation::none;
  std::string demo_path;  // empty: train from scratch
  std::uint64_t seed = 0;

  // post-warmup collection; epsilon only applies to greedy mode
  CollectMode collect = CollectMode::greedy;
  double epsilon = 0.0;

  double lr = 5e-4;      // MLP updates
  int eval_goal_count = 200;
  int h_max = 3;                             // limited_relabel horizon cap
  std::size_t window_transitions = 10000;    // on_policy buffer window

  void validate() const;  // throws std::invalid_argument
};

struct MetricsRow {
  long long env_steps = 0;
  double median_final_distance = 0.0;
  double success_ratio = 0.0;
  double mean_training_loss = 0.0;  // NaN until the first update
};

// Return false to stop training after the current evaluation point.
using MetricsSink = std::function<bool(const MetricsRow&)>;

struct TrainResult {
  std::vector<MetricsRow> metrics;
  long long env_steps = 0;  // requested total rounded up to whole trajectories
  long long trajectories = 0;
  int demo_count = 0;
  bool stopped_early = false;
};

// One T-step episode commanded with `goal`. Actions are uniform, greedy
// (optionally epsilon-greedy), or sampled from the policy; the policy always
// sees the remaining horizon.
Trajectory collect_trajectory(const Policy& policy, const Env& env, const Goal& goal,
                              CollectMode mode, double epsilon, Rng& rng);

// Appends every trajectory in the log at `path`; returns how many.
int bootstrap_from_demos(ReplayBuffer& buffer, const std::string& path);

// The GCSL loop: collect a trajectory with the current policy, append it to
// the replay buffer, then do T x grad_steps_per_env_step supervised updates
// (MLP: Adam on relabel-sampled batches; tabular: count updates on the new
// trajectory's relabeled examples). Evaluates on a fixed goal set every
// eval_every env steps and always at the end.
TrainResult train(const Env& env, Policy& policy, const TrainConfig& cfg,
                  const MetricsSink& sink = {});

struct SweepRow {
  int hidden_size = 0;
  int grad_steps = 0;
  MetricsRow final_row;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double iqr_final_success = 0.0;  // dispersion across configurations
};

// 3x3 grid over hidden-layer width x gradient steps per env step, every run
// with the same seed schedule. Individual failures are recorded and the sweep
// continues.
SweepResult run_sweep(const Env& env, const TrainConfig& base,
                      const std::vector<int>& hidden_sizes = {250, 500, 1000},
                      const std::vector<int>& grad_steps = {1, 2, 4});

}  // namespace gcsl
