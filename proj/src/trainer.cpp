#include "gcsl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>

#include "gcsl/mlp.hpp"
#include "gcsl/trajectory_log.hpp"

namespace gcsl {

Ablation ablation_from_string(const std::string& name) {
  std::string s = name;
  std::replace(s.begin(), s.end(), '-', '_');  // accept CLI spelling
  if (s == "none") return Ablation::none;
  if (s == "time_varying") return Ablation::time_varying;
  if (s == "limited_relabel") return Ablation::limited_relabel;
  if (s == "on_policy") return Ablation::on_policy;
  if (s == "fixed_collection") return Ablation::fixed_collection;
  throw std::invalid_argument("unknown ablation: " + name);
}

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::none: return "none";
    case Ablation::time_varying: return "time_varying";
    case Ablation::limited_relabel: return "limited_relabel";
    case Ablation::on_policy: return "on_policy";
    case Ablation::fixed_collection: return "fixed_collection";
  }
  throw std::logic_error("bad ablation value");
}

CollectMode collect_mode_from_string(const std::string& s) {
  if (s == "uniform") return CollectMode::uniform;
  if (s == "greedy") return CollectMode::greedy;
  if (s == "sampled") return CollectMode::sampled;
  throw std::invalid_argument("unknown collect mode: " + s);
}

std::string to_string(CollectMode m) {
  switch (m) {
    case CollectMode::uniform: return "uniform";
    case CollectMode::greedy: return "greedy";
    case CollectMode::sampled: return "sampled";
  }
  throw std::logic_error("bad collect mode value");
}

void TrainConfig::validate() const {
  if (total_env_steps <= 0) throw std::invalid_argument("total_env_steps must be positive");
  if (warmup_steps < 0 || warmup_steps > total_env_steps)
    throw std::invalid_argument("warmup_steps must lie in [0, total_env_steps]");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (grad_steps_per_env_step <= 0)
    throw std::invalid_argument("grad_steps_per_env_step must be positive");
  if (eval_every <= 0) throw std::invalid_argument("eval_every must be positive");
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must lie in [0,1]");
  if (eval_goal_count <= 0) throw std::invalid_argument("eval_goal_count must be positive");
  if (h_max < 1) throw std::invalid_argument("h_max must be >= 1");
  if (window_transitions == 0) throw std::invalid_argument("window_transitions must be positive");
}

Trajectory collect_trajectory(const Policy& policy, const Env& env, const Goal& goal,
                              CollectMode mode, double epsilon, Rng& rng) {
  const int T = env.spec().horizon;
  const int A = env.spec().action_count;
  Trajectory tr;
  tr.commanded_goal = goal;
  tr.seed = rng.seed();
  tr.states.reserve(T + 1);
  tr.actions.reserve(T);
  tr.states.push_back(env.reset(rng));
  for (int t = 0; t < T; ++t) {
    int a;
    switch (mode) {
      case CollectMode::uniform:
        a = rng.uniform_int(A);
        break;
      case CollectMode::greedy:
        if (epsilon > 0.0 && rng.uniform01() < epsilon)
          a = rng.uniform_int(A);
        else
          a = greedy_action(policy, tr.states.back(), goal, T - t);
        break;
      case CollectMode::sampled:
        a = sample_action(policy, tr.states.back(), goal, T - t, rng);
        break;
      default:
        throw std::logic_error("bad collect mode");
    }
    tr.actions.push_back(a);
    tr.states.push_back(env.step(tr.states.back(), a, rng));
  }
  return tr;
}

int bootstrap_from_demos(ReplayBuffer& buffer, const std::string& path) {
  auto trajs = load_trajectories(path);
  for (auto& t : trajs) buffer.append(std::move(t));
  return (int)trajs.size();
}

namespace {

// Incremental count-table updates: each trajectory is tallied exactly once
// (all relabeled pairs), so new data enters at full weight. The on_policy
// variant untallies trajectories as they slide out of the window.
struct TabularUpdater {
  TabularPolicy& policy;
  const TrainConfig& cfg;
  std::deque<Trajectory> pending;   // collected (or demo) but not yet tallied
  std::deque<Trajectory> window;    // tallied, kept for on_policy eviction
  std::size_t window_transitions = 0;

  double drain() {  // returns summed pre-fit nll over drained trajectories
    double nll_sum = 0.0;
    const int cap = cfg.ablation == Ablation::limited_relabel ? cfg.h_max : 0;
    while (!pending.empty()) {
      Trajectory tr = std::move(pending.front());
      pending.pop_front();
      const auto examples = ReplayBuffer::relabel_all(tr, cap);
      nll_sum += policy.nll(examples);
      policy.fit(examples);
      if (cfg.ablation == Ablation::on_policy) {
        window_transitions += tr.length();
        window.push_back(std::move(tr));
        while (window_transitions > cfg.window_transitions && window.size() > 1) {
          const Trajectory& old = window.front();
          for (const auto& ex : ReplayBuffer::relabel_all(old, cap))
            policy.observe((int)std::llround(ex.state[0]), (int)std::llround(ex.goal[0]),
                           ex.horizon, ex.action, -1.0);
          window_transitions -= old.length();
          window.pop_front();
        }
      }
    }
    return nll_sum;
  }
};

}  // namespace

TrainResult train(const Env& env, Policy& policy, const TrainConfig& cfg,
                  const MetricsSink& sink) {
  cfg.validate();
  const int T = env.spec().horizon;
  const long long n_traj = (cfg.total_env_steps + T - 1) / T;

  TrainResult result;

  auto* tab = dynamic_cast<TabularPolicy*>(&policy);
  auto* mlp = dynamic_cast<MlpPolicy*>(&policy);
  if (!tab && !mlp) throw std::invalid_argument("train: policy must be tabular or MLP");

  const Rng root(cfg.seed);

  BufferConfig bc;
  bc.mode = cfg.ablation == Ablation::limited_relabel ? RelabelMode::limited
            : cfg.ablation == Ablation::on_policy     ? RelabelMode::on_policy
                                                      : RelabelMode::full;
  bc.h_max = cfg.h_max;
  bc.window_transitions = cfg.window_transitions;
  ReplayBuffer buffer(bc);

  std::optional<TabularUpdater> tab_up;
  if (tab) tab_up.emplace(TabularUpdater{*tab, cfg});

  if (!cfg.demo_path.empty()) {
    result.demo_count = bootstrap_from_demos(buffer, cfg.demo_path);
    if (tab)
      for (int i = 0; i < result.demo_count; ++i)
        tab_up->pending.push_back(buffer.trajectory(i));
  }

  std::optional<MlpLearner> learner;
  if (mlp) learner.emplace(*mlp, cfg.lr);
  const Policy& acting = mlp ? static_cast<const Policy&>(learner->policy()) : policy;

  std::vector<Goal> eval_goals;
  {
    Rng goal_rng = root.child("goal");
    eval_goals.reserve(cfg.eval_goal_count);
    for (int i = 0; i < cfg.eval_goal_count; ++i) eval_goals.push_back(env.sample_goal(goal_rng));
  }

  double loss_sum = 0.0;
  long long loss_updates = 0;
  long long steps = 0;
  int eval_index = 0;
  std::vector<RelabeledExample> batch;

  long long k = 0;
  for (; k < n_traj; ++k) {
    Rng traj_rng = root.child("collect", (std::uint64_t)k);
    const Goal goal = env.sample_goal(traj_rng);
    const bool warm = steps < cfg.warmup_steps;
    const CollectMode mode = (warm || cfg.ablation == Ablation::fixed_collection)
                                 ? CollectMode::uniform
                                 : cfg.collect;
    Trajectory tr = collect_trajectory(acting, env, goal, mode, cfg.epsilon, traj_rng);
    const long long prev_steps = steps;
    steps += T;

    if (tab) tab_up->pending.push_back(tr);
    buffer.append(std::move(tr));

    if (steps >= cfg.warmup_steps) {
      if (tab) {
        loss_updates += (long long)tab_up->pending.size();
        loss_sum += tab_up->drain();
      } else {
        Rng train_rng = root.child("train", (std::uint64_t)k);
        const long long n_updates = (long long)T * cfg.grad_steps_per_env_step;
        for (long long u = 0; u < n_updates; ++u) {
          buffer.sample_batch(cfg.batch_size, train_rng, batch);
          loss_sum += learner->update(batch);
          ++loss_updates;
        }
      }
    }

    const bool crossed = steps / cfg.eval_every > prev_steps / cfg.eval_every;
    const bool last = k + 1 == n_traj;
    if (crossed || last) {
      const EvalReport rep = evaluate(acting, env, eval_goals, env.spec().goal_threshold,
                                      root.child("eval", (std::uint64_t)eval_index++));
      MetricsRow row;
      row.env_steps = steps;
      row.median_final_distance = rep.median_final_distance;
      row.success_ratio = rep.success_ratio;
      row.mean_training_loss =
          loss_updates > 0 ? loss_sum / (double)loss_updates : std::numeric_limits<double>::quiet_NaN();
      result.metrics.push_back(row);
      loss_sum = 0.0;
      loss_updates = 0;
      if (sink && !sink(row)) {
        result.stopped_early = true;
        break;
      }
    }
  }

  if (mlp) mlp->params() = learner->policy().params();
  result.env_steps = steps;
  result.trajectories = std::min(k + 1, n_traj);
  return result;
}

SweepResult run_sweep(const Env& env, const TrainConfig& base,
                      const std::vector<int>& hidden_sizes, const std::vector<int>& grad_steps) {
  SweepResult out;
  for (const int hs : hidden_sizes)
    for (const int gs : grad_steps) {
      SweepRow row;
      row.hidden_size = hs;
      row.grad_steps = gs;
      try {
        TrainConfig cfg = base;
        cfg.grad_steps_per_env_step = gs;
        Rng init = Rng(cfg.seed).child("init");
        MlpPolicy policy(env.codec(cfg.ablation == Ablation::time_varying), {hs, hs},
                         env.spec().action_count, init);
        const TrainResult res = train(env, policy, cfg);
        row.final_row = res.metrics.back();
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
      out.rows.push_back(std::move(row));
    }

  std::vector<double> succ;
  for (const auto& r : out.rows)
    if (!r.failed) succ.push_back(r.final_row.success_ratio);
  if (succ.size() >= 2) {
    std::sort(succ.begin(), succ.end());
    const auto quantile = [&](double p) {
      const double pos = p * (double)(succ.size() - 1);
      const std::size_t lo = (std::size_t)pos;
      const double frac = pos - (double)lo;
      return lo + 1 < succ.size() ? succ[lo] + (succ[lo + 1] - succ[lo]) * frac : succ[lo];
    };
    out.iqr_final_success = quantile(0.75) - quantile(0.25);
  }
  return out;
}

}  // namespace gcsl
