#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "gcsl/env.hpp"
#include "gcsl/policy.hpp"

namespace gcsl {

struct Trajectory {
  std::vector<StateVec> states;  // T+1 entries
  std::vector<int> actions;      // T entries
  Goal commanded_goal;
  std::uint64_t seed = 0;  // stream seed the trajectory was collected with

  int length() const { return static_cast<int>(actions.size()); }
  void validate() const;  // throws std::invalid_argument on shape violations
};

enum class RelabelMode {
  full,      // goal index t' anywhere in (t, T]
  limited,   // t' within (t, min(t+h_max, T)]
  on_policy  // full relabeling over a sliding window of recent trajectories
};

struct BufferConfig {
  RelabelMode mode = RelabelMode::full;
  int h_max = 3;                            // limited mode
  std::size_t window_transitions = 10000;   // on_policy mode
};

// Trajectory store with lazy hindsight relabeling: examples are materialized
// at sampling time by drawing (trajectory, t, t') and emitting
// (s_t, a_t, goal=s_t', horizon=t'-t).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(BufferConfig cfg = {});

  void append(Trajectory traj);
  std::size_t size() const { return trajs_.size(); }  // trajectories held
  std::size_t total_transitions() const { return transitions_; }
  const Trajectory& trajectory(std::size_t i) const { return trajs_.at(i); }
  const BufferConfig& config() const { return cfg_; }

  // n independent draws: trajectory uniform, t uniform on {0..T-1}, t'
  // uniform on {t+1..min(t+h_max, T)}; reuses `out` storage
  void sample_batch(int n, Rng& rng, std::vector<RelabeledExample>& out) const;
  std::vector<RelabeledExample> sample_batch(int n, Rng& rng) const;

  // every admissible (t, t') pair of one trajectory; h_max <= 0 means no cap
  static std::vector<RelabeledExample> relabel_all(const Trajectory& traj, int h_max = 0);

 private:
  BufferConfig cfg_;
  std::deque<Trajectory> trajs_;
  std::size_t transitions_ = 0;
};

}  // namespace gcsl
