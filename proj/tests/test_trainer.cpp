#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "gcsl/mlp.hpp"
#include "gcsl/oracle.hpp"
#include "gcsl/trainer.hpp"
#include "gcsl/trajectory_log.hpp"

using namespace gcsl;

namespace {

bool same_metric(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same_rows(const std::vector<MetricsRow>& a, const std::vector<MetricsRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].env_steps != b[i].env_steps) return false;
    if (!same_metric(a[i].median_final_distance, b[i].median_final_distance)) return false;
    if (!same_metric(a[i].success_ratio, b[i].success_ratio)) return false;
    if (!same_metric(a[i].mean_training_loss, b[i].mean_training_loss)) return false;
  }
  return true;
}

TrainConfig small_cfg() {
  TrainConfig cfg;
  cfg.total_env_steps = 200;
  cfg.warmup_steps = 40;
  cfg.eval_every = 100;
  cfg.eval_goal_count = 5;
  cfg.collect = CollectMode::sampled;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("ablation and collect-mode names round-trip, hyphens accepted") {
  for (const auto a : {Ablation::none, Ablation::time_varying, Ablation::limited_relabel,
                       Ablation::on_policy, Ablation::fixed_collection})
    CHECK(ablation_from_string(to_string(a)) == a);
  CHECK(ablation_from_string("limited-relabel") == Ablation::limited_relabel);
  CHECK(ablation_from_string("fixed-collection") == Ablation::fixed_collection);
  CHECK_THROWS(ablation_from_string("bogus"));
  for (const auto m : {CollectMode::uniform, CollectMode::greedy, CollectMode::sampled})
    CHECK(collect_mode_from_string(to_string(m)) == m);
  CHECK_THROWS(collect_mode_from_string("bogus"));
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  TrainConfig bad = cfg;
  bad.warmup_steps = bad.total_env_steps + 1;
  CHECK_THROWS(bad.validate());
  bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS(bad.validate());
  bad = cfg;
  bad.epsilon = 1.5;
  CHECK_THROWS(bad.validate());
  bad = cfg;
  bad.eval_every = 0;
  CHECK_THROWS(bad.validate());
  bad = cfg;
  bad.grad_steps_per_env_step = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("collect_trajectory: shapes, horizon threading, greedy determinism") {
  FiniteEnv env(make_grid3(4), "grid3");
  TabularPolicy pi(9, 5, 4, 0.5);
  Rng r1(3), r2(3);
  const Trajectory a = collect_trajectory(pi, env, {5.0}, CollectMode::uniform, 0.0, r1);
  CHECK(a.states.size() == 5);
  CHECK(a.actions.size() == 4);
  for (int act : a.actions) {
    CHECK(act >= 0);
    CHECK(act < 5);
  }
  const Trajectory b = collect_trajectory(pi, env, {5.0}, CollectMode::uniform, 0.0, r2);
  CHECK(a.states == b.states);
  CHECK(a.actions == b.actions);

  // greedy on an empty table walks the lowest-index action everywhere
  Rng r3(4);
  const Trajectory c = collect_trajectory(pi, env, {5.0}, CollectMode::greedy, 0.0, r3);
  for (int act : c.actions) CHECK(act == 0);
}

TEST_CASE("step budget is rounded up to whole trajectories") {
  FiniteEnv env(make_grid3(4), "grid3");  // T = 4
  TabularPolicy pi(9, 5, 4, 0.5);
  TrainConfig cfg = small_cfg();
  cfg.total_env_steps = 10;  // -> 3 trajectories, 12 steps
  cfg.warmup_steps = 8;
  cfg.eval_every = 4;
  const TrainResult res = train(env, pi, cfg);
  CHECK(res.env_steps == 12);
  CHECK(res.trajectories == 3);
  CHECK(res.metrics.back().env_steps == 12);
}

TEST_CASE("no updates before the warmup boundary") {
  FiniteEnv env(make_grid3(4), "grid3");
  TabularPolicy pi(9, 5, 4, 0.5);
  TrainConfig cfg = small_cfg();
  cfg.total_env_steps = 80;
  cfg.warmup_steps = 40;
  cfg.eval_every = 20;
  const TrainResult res = train(env, pi, cfg);
  REQUIRE(res.metrics.size() >= 4);
  CHECK(std::isnan(res.metrics[0].mean_training_loss));  // 20 steps: still warming up
  CHECK(std::isfinite(res.metrics[1].mean_training_loss));  // 40 steps: backlog flushed
  CHECK(std::isfinite(res.metrics.back().mean_training_loss));
}

TEST_CASE("identical config and seed reproduce the metrics stream exactly") {
  FiniteEnv env(make_grid3(4), "grid3");
  const TrainConfig cfg = small_cfg();
  TabularPolicy p1(9, 5, 4, 0.5), p2(9, 5, 4, 0.5);
  const TrainResult r1 = train(env, p1, cfg);
  const TrainResult r2 = train(env, p2, cfg);
  CHECK(same_rows(r1.metrics, r2.metrics));
  CHECK(p1.counts() == p2.counts());

  TrainConfig other = cfg;
  other.seed = 12;
  TabularPolicy p3(9, 5, 4, 0.5);
  const TrainResult r3 = train(env, p3, other);
  CHECK_FALSE(same_rows(r1.metrics, r3.metrics));
}

TEST_CASE("fixed-collection ablation behaves exactly like uniform collection") {
  FiniteEnv env(make_grid3(4), "grid3");
  TrainConfig fixed = small_cfg();
  fixed.ablation = Ablation::fixed_collection;
  fixed.collect = CollectMode::greedy;  // must be ignored
  TrainConfig uniform = small_cfg();
  uniform.collect = CollectMode::uniform;
  TabularPolicy p1(9, 5, 4, 0.5), p2(9, 5, 4, 0.5);
  const TrainResult rf = train(env, p1, fixed);
  const TrainResult ru = train(env, p2, uniform);
  CHECK(same_rows(rf.metrics, ru.metrics));
  CHECK(p1.counts() == p2.counts());
}

TEST_CASE("limited relabeling leaves long-horizon cells untouched") {
  FiniteEnv env(make_grid3(4), "grid3");
  TabularPolicy pi(9, 5, 4, 0.5);
  TrainConfig cfg = small_cfg();
  cfg.ablation = Ablation::limited_relabel;
  cfg.h_max = 3;
  train(env, pi, cfg);
  double h4_mass = 0.0, h1_mass = 0.0;
  for (int s = 0; s < 9; ++s)
    for (int g = 0; g < 9; ++g)
      for (int a = 0; a < 5; ++a) {
        h4_mass += pi.counts()[(((size_t)s * 9 + g) * 4 + 3) * 5 + a];
        h1_mass += pi.counts()[(((size_t)s * 9 + g) * 4 + 0) * 5 + a];
      }
  CHECK(h4_mass == 0.0);
  CHECK(h1_mass > 0.0);
}

TEST_CASE("on-policy ablation keeps only the window's worth of counts") {
  FiniteEnv env(make_grid3(4), "grid3");  // T=4, relabel_all -> 10 examples/trajectory
  TabularPolicy pi(9, 5, 4, 0.0);
  TrainConfig cfg = small_cfg();
  cfg.ablation = Ablation::on_policy;
  cfg.window_transitions = 8;  // two trajectories
  train(env, pi, cfg);
  double total = 0.0;
  for (double c : pi.counts()) total += c;
  CHECK(total == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("demo trajectories are preloaded and tallied") {
  FiniteEnv env(make_grid3(4), "grid3");
  const auto tmp = std::filesystem::temp_directory_path() / "gcsl_test_demos.log";
  {
    TabularPolicy scratch(9, 5, 4, 0.5);
    Rng rng(21);
    std::vector<Trajectory> demos;
    for (int i = 0; i < 3; ++i)
      demos.push_back(
          collect_trajectory(scratch, env, env.sample_goal(rng), CollectMode::uniform, 0.0, rng));
    save_trajectories(tmp.string(), demos);
  }
  TabularPolicy pi(9, 5, 4, 0.0);
  TrainConfig cfg = small_cfg();
  cfg.total_env_steps = 40;
  cfg.warmup_steps = 40;  // all collection stays uniform
  cfg.demo_path = tmp.string();
  const TrainResult res = train(env, pi, cfg);
  CHECK(res.demo_count == 3);
  double total = 0.0;
  for (double c : pi.counts()) total += c;
  // 10 trajectories collected + 3 demos, 10 relabeled examples each
  CHECK(total == doctest::Approx(130.0));
  std::filesystem::remove(tmp);
}

TEST_CASE("metrics sink can stop a run early") {
  FiniteEnv env(make_grid3(4), "grid3");
  TabularPolicy pi(9, 5, 4, 0.5);
  TrainConfig cfg = small_cfg();
  cfg.total_env_steps = 400;
  cfg.eval_every = 40;
  int rows = 0;
  const TrainResult res = train(env, pi, cfg, [&](const MetricsRow&) { return ++rows < 2; });
  CHECK(res.stopped_early);
  CHECK(rows == 2);
  CHECK(res.metrics.size() == 2);
  CHECK(res.env_steps == 80);
}

TEST_CASE("mlp policy trains through the same loop") {
  FiniteEnv env(make_chain(4, 3), "chain");
  Rng init(5);
  MlpPolicy pi(env.codec(false), {8}, 3, init);
  const MlpParams before = pi.params();
  TrainConfig cfg;
  cfg.total_env_steps = 60;
  cfg.warmup_steps = 15;
  cfg.batch_size = 8;
  cfg.eval_every = 30;
  cfg.eval_goal_count = 6;
  cfg.collect = CollectMode::greedy;
  cfg.seed = 2;
  const TrainResult res = train(env, pi, cfg);
  CHECK(res.env_steps == 60);
  CHECK(std::isfinite(res.metrics.back().mean_training_loss));
  CHECK(pi.params().flat != before.flat);  // parameters actually moved

  // and the run is reproducible
  Rng init2(5);
  MlpPolicy pi2(env.codec(false), {8}, 3, init2);
  const TrainResult res2 = train(env, pi2, cfg);
  CHECK(same_rows(res.metrics, res2.metrics));
  CHECK(pi.params().flat == pi2.params().flat);
}

TEST_CASE("training rejects unsupported policy types") {
  FiniteEnv env(make_chain(4, 3), "chain");
  const auto oracle_pi = TabularDistributionPolicy::uniform(*env.finite());
  TabularDistributionPolicy copy = oracle_pi;
  TrainConfig cfg = small_cfg();
  CHECK_THROWS_AS(train(env, copy, cfg), std::invalid_argument);
}

TEST_CASE("tiny hyperparameter sweep: full grid, reproducible rows") {
  FiniteEnv env(make_chain(4, 3), "chain");
  TrainConfig base;
  base.total_env_steps = 30;
  base.warmup_steps = 9;
  base.batch_size = 8;
  base.eval_every = 30;
  base.eval_goal_count = 4;
  base.seed = 7;
  const SweepResult a = run_sweep(env, base, {4, 6}, {1, 2});
  REQUIRE(a.rows.size() == 4);
  for (const auto& r : a.rows) {
    CHECK_FALSE(r.failed);
    CHECK(r.final_row.env_steps == 30);
  }
  const SweepResult b = run_sweep(env, base, {4, 6}, {1, 2});
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].hidden_size == b.rows[i].hidden_size);
    CHECK(a.rows[i].grad_steps == b.rows[i].grad_steps);
    CHECK(same_metric(a.rows[i].final_row.success_ratio, b.rows[i].final_row.success_ratio));
  }
  CHECK(a.iqr_final_success >= 0.0);
}
