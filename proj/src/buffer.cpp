#include "gcsl/buffer.hpp"

#include <stdexcept>

namespace gcsl {

void Trajectory::validate() const {
  if (actions.empty()) throw std::invalid_argument("Trajectory: no actions");
  if (states.size() != actions.size() + 1)
    throw std::invalid_argument("Trajectory: need exactly one more state than actions");
  const std::size_t dim = states[0].size();
  if (dim == 0) throw std::invalid_argument("Trajectory: empty state");
  for (const StateVec& s : states)
    if (s.size() != dim) throw std::invalid_argument("Trajectory: inconsistent state dimension");
  if (commanded_goal.size() != dim)
    throw std::invalid_argument("Trajectory: goal dimension mismatch");
}

ReplayBuffer::ReplayBuffer(BufferConfig cfg) : cfg_(cfg) {
  if (cfg_.mode == RelabelMode::limited && cfg_.h_max < 1)
    throw std::invalid_argument("ReplayBuffer: limited mode needs h_max >= 1");
  if (cfg_.mode == RelabelMode::on_policy && cfg_.window_transitions < 1)
    throw std::invalid_argument("ReplayBuffer: on_policy mode needs a positive window");
}

void ReplayBuffer::append(Trajectory traj) {
  traj.validate();
  transitions_ += traj.length();
  trajs_.push_back(std::move(traj));
  if (cfg_.mode == RelabelMode::on_policy) {
    // evict whole trajectories, oldest first, once the window overflows
    while (transitions_ > cfg_.window_transitions && trajs_.size() > 1) {
      transitions_ -= trajs_.front().length();
      trajs_.pop_front();
    }
  }
}

void ReplayBuffer::sample_batch(int n, Rng& rng, std::vector<RelabeledExample>& out) const {
  if (trajs_.empty()) throw std::logic_error("ReplayBuffer::sample_batch: buffer is empty");
  if (n < 1) throw std::invalid_argument("ReplayBuffer::sample_batch: n must be positive");
  out.resize(n);
  const int traj_count = static_cast<int>(trajs_.size());
  for (int i = 0; i < n; ++i) {
    const Trajectory& traj = trajs_[rng.uniform_int(traj_count)];
    const int T = traj.length();
    const int t = rng.uniform_int(T);
    const int hi = cfg_.mode == RelabelMode::limited ? std::min(t + cfg_.h_max, T) : T;
    const int tp = t + 1 + rng.uniform_int(hi - t);
    RelabeledExample& ex = out[i];
    ex.state = traj.states[t];
    ex.action = traj.actions[t];
    ex.goal = traj.states[tp];
    ex.horizon = tp - t;
  }
}

std::vector<RelabeledExample> ReplayBuffer::sample_batch(int n, Rng& rng) const {
  std::vector<RelabeledExample> out;
  sample_batch(n, rng, out);
  return out;
}

std::vector<RelabeledExample> ReplayBuffer::relabel_all(const Trajectory& traj, int h_max) {
  traj.validate();
  const int T = traj.length();
  std::vector<RelabeledExample> out;
  for (int t = 0; t < T; ++t) {
    const int hi = h_max > 0 ? std::min(t + h_max, T) : T;
    for (int tp = t + 1; tp <= hi; ++tp)
      out.push_back({traj.states[t], traj.actions[t], traj.states[tp], tp - t});
  }
  return out;
}

}  // namespace gcsl
