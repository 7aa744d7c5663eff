#include "gcsl/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace gcsl {

Trajectory rollout(const Policy& policy, const Env& env, const Goal& goal, Rng& rng,
                   bool greedy) {
  const int T = env.spec().horizon;
  Trajectory tr;
  tr.commanded_goal = goal;
  tr.seed = rng.seed();
  tr.states.reserve(T + 1);
  tr.actions.reserve(T);
  tr.states.push_back(env.reset(rng));
  for (int t = 0; t < T; ++t) {
    const int h = T - t;  // remaining steps
    const StateVec& cur = tr.states.back();
    const int a = greedy ? greedy_action(policy, cur, goal, h)
                         : sample_action(policy, cur, goal, h, rng);
    tr.actions.push_back(a);
    tr.states.push_back(env.step(cur, a, rng));
  }
  return tr;
}

double lower_median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("lower_median: empty");
  const std::size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

EvalReport evaluate(const Policy& policy, const Env& env, const std::vector<Goal>& goals,
                    double threshold, const Rng& rng, bool greedy) {
  if (goals.empty()) throw std::invalid_argument("evaluate: no goals");
  const int n = static_cast<int>(goals.size());
  EvalReport rep;
  rep.n_episodes = n;
  rep.episodes.resize(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Rng ep_rng = rng.child("episode", static_cast<std::uint64_t>(i));
    const Trajectory tr = rollout(policy, env, goals[i], ep_rng, greedy);
    const double d = env.distance(tr.states.back(), goals[i]);
    rep.episodes[i] = {goals[i], d, d < threshold};
  }
  std::vector<double> dists;
  dists.reserve(n);
  double mean = 0.0;
  int successes = 0;
  for (const EpisodeRecord& e : rep.episodes) {
    dists.push_back(e.final_distance);
    mean += e.final_distance;
    successes += e.success;
  }
  rep.median_final_distance = lower_median(std::move(dists));
  rep.mean_final_distance = mean / n;
  rep.success_ratio = static_cast<double>(successes) / n;
  return rep;
}

}  // namespace gcsl
