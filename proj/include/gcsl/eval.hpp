#pragma once

#include <vector>

#include "gcsl/buffer.hpp"
#include "gcsl/env.hpp"
#include "gcsl/policy.hpp"

namespace gcsl {

struct EpisodeRecord {
  Goal goal;
  double final_distance = 0.0;
  bool success = false;
};

struct EvalReport {
  int n_episodes = 0;
  double median_final_distance = 0.0;  // lower median for even counts
  double mean_final_distance = 0.0;
  double success_ratio = 0.0;  // fraction with final distance < threshold
  std::vector<EpisodeRecord> episodes;
};

// T-step episode toward `goal`; greedy or sampled action selection. The
// policy sees the remaining horizon at each step.
Trajectory rollout(const Policy& policy, const Env& env, const Goal& goal, Rng& rng,
                   bool greedy);

// One rollout per goal with a per-episode derived rng stream; episodes run in
// parallel and land in indexed slots, so the report is schedule-independent.
EvalReport evaluate(const Policy& policy, const Env& env, const std::vector<Goal>& goals,
                    double threshold, const Rng& rng, bool greedy = true);

double lower_median(std::vector<double> v);

}  // namespace gcsl
