// Command-line front end: train / eval / ablate / sweep / verify / demos.
// Exit codes: 0 success, 1 check failure, 2 usage or config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <gcsl/version.hpp>

#include "gcsl/checkpoint.hpp"
#include "gcsl/config.hpp"
#include "gcsl/eval.hpp"
#include "gcsl/mlp.hpp"
#include "gcsl/oracle.hpp"
#include "gcsl/trainer.hpp"
#include "gcsl/trajectory_log.hpp"

#ifndef GCSL_GIT_DESCRIBE
#define GCSL_GIT_DESCRIBE "unknown"
#endif

namespace fs = std::filesystem;
using namespace gcsl;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CommonTrainArgs {
  std::string config_path, env_name, out_dir, ablation, demo_path;
  long long steps = -1;
  long long seed = -1;
  bool force = false;
  std::vector<std::string> sets;
};

void add_train_flags(CLI::App* cmd, CommonTrainArgs& a, bool ablation_required) {
  cmd->add_option("--config", a.config_path, "config file (key = value lines)");
  cmd->add_option("--env", a.env_name, "environment name (grid-rooms, four-rooms, chain)");
  cmd->add_option("--seed", a.seed, "root RNG seed");
  cmd->add_option("--steps", a.steps, "total environment steps");
  auto* ab = cmd->add_option("--ablation", a.ablation,
                             "none, time-varying, limited-relabel, on-policy, fixed-collection");
  if (ablation_required) ab->required();
  cmd->add_option("--demos", a.demo_path, "trajectory log to preload into the buffer");
  cmd->add_option("--set", a.sets, "extra key=value overrides")->take_all();
  cmd->add_option("--out", a.out_dir, "output directory")->required();
  cmd->add_flag("--force", a.force, "allow overwriting an existing output directory");
}

RunConfig build_config(const CommonTrainArgs& a) {
  RunConfig cfg;
  if (!a.config_path.empty()) {
    cfg = load_config_file(a.config_path);
    if (!a.env_name.empty()) apply_setting(cfg, "env.name", a.env_name);
  } else {
    cfg = default_run_config(a.env_name.empty() ? "grid-rooms" : a.env_name);
  }
  if (a.seed >= 0) cfg.train.seed = (std::uint64_t)a.seed;
  if (a.steps > 0) cfg.train.total_env_steps = a.steps;
  if (!a.ablation.empty()) cfg.train.ablation = ablation_from_string(a.ablation);
  if (!a.demo_path.empty()) cfg.train.demo_path = a.demo_path;
  apply_overrides(cfg, a.sets);
  return cfg;
}

void prepare_out_dir(const std::string& dir, bool force) {
  const fs::path p(dir);
  if (fs::exists(p) && (fs::exists(p / "metrics.csv") || fs::exists(p / "run.json") ||
                        fs::exists(p / "sweep.csv")))
    if (!force)
      throw UsageError("output directory '" + dir + "' already holds results; pass --force");
  fs::create_directories(p);
}

void write_run_manifest(const fs::path& path, const RunConfig& cfg, const TrainResult* res) {
  nlohmann::json j;
  j["config"] = cfg.items();
  j["seed"] = cfg.train.seed;
  j["git_describe"] = GCSL_GIT_DESCRIBE;
  if (res) {
    j["env_steps"] = res->env_steps;
    j["trajectories"] = res->trajectories;
    j["demo_count"] = res->demo_count;
  }
  std::ofstream os(path);
  os << j.dump(2) << "\n";
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

int cmd_train(const CommonTrainArgs& a) {
  const RunConfig cfg = build_config(a);
  prepare_out_dir(a.out_dir, a.force);
  const auto env = cfg.make_environment();
  const auto policy = cfg.make_policy(*env);

  const fs::path out(a.out_dir);
  std::ofstream metrics(out / "metrics.csv");
  if (!metrics) throw std::runtime_error("cannot write " + (out / "metrics.csv").string());
  metrics << "env_steps,median_final_distance,success_ratio,mean_training_loss\n";
  const MetricsSink sink = [&](const MetricsRow& r) {
    metrics << r.env_steps << ',' << fmt17(r.median_final_distance) << ','
            << fmt17(r.success_ratio) << ',' << fmt17(r.mean_training_loss) << '\n';
    metrics.flush();
    std::fprintf(stderr, "  steps %lld  median_dist %.4f  success %.4f  loss %.5f\n",
                 r.env_steps, r.median_final_distance, r.success_ratio, r.mean_training_loss);
    return true;
  };

  const TrainResult res = train(*env, *policy, cfg.train, sink);
  save_checkpoint(*policy, (out / "policy.ckpt").string());
  write_run_manifest(out / "run.json", cfg, &res);
  std::fprintf(stderr, "done: %lld env steps, %lld trajectories -> %s\n", res.env_steps,
               res.trajectories, a.out_dir.c_str());
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& config_path, const std::string& env_name,
             int n_goals, long long seed, const std::string& out_dir, bool force) {
  RunConfig cfg = config_path.empty() ? default_run_config(env_name.empty() ? "grid-rooms" : env_name)
                                      : load_config_file(config_path);
  if (!env_name.empty()) cfg.env_name = env_name;
  const auto env = cfg.make_environment();
  const auto policy = load_checkpoint(ckpt);

  const Rng root((std::uint64_t)(seed >= 0 ? seed : 0));
  Rng goal_rng = root.child("goal");
  std::vector<Goal> goals;
  for (int i = 0; i < n_goals; ++i) goals.push_back(env->sample_goal(goal_rng));
  const EvalReport rep =
      evaluate(*policy, *env, goals, env->spec().goal_threshold, root.child("eval"));

  std::printf("episodes %d\nmedian_final_distance %.17g\nmean_final_distance %.17g\n"
              "success_ratio %.17g\n",
              rep.n_episodes, rep.median_final_distance, rep.mean_final_distance,
              rep.success_ratio);
  if (!out_dir.empty()) {
    prepare_out_dir(out_dir, force);
    std::ofstream os(fs::path(out_dir) / "eval_episodes.csv");
    os << "goal,final_distance,success\n";
    for (const auto& ep : rep.episodes) {
      std::string g;
      for (std::size_t i = 0; i < ep.goal.size(); ++i)
        g += (i ? ";" : "") + fmt17(ep.goal[i]);
      os << g << ',' << fmt17(ep.final_distance) << ',' << (ep.success ? 1 : 0) << '\n';
    }
    if (!os) throw std::runtime_error("cannot write eval_episodes.csv");
  }
  return 0;
}

int cmd_sweep(const CommonTrainArgs& a) {
  RunConfig cfg = a.config_path.empty()
                      ? default_run_config(a.env_name.empty() ? "four-rooms" : a.env_name)
                      : load_config_file(a.config_path);
  if (!a.env_name.empty()) cfg.env_name = a.env_name;
  if (a.seed >= 0) cfg.train.seed = (std::uint64_t)a.seed;
  if (a.steps > 0) cfg.train.total_env_steps = a.steps;
  apply_overrides(cfg, a.sets);
  prepare_out_dir(a.out_dir, a.force);

  const auto env = cfg.make_environment();
  const SweepResult sw = run_sweep(*env, cfg.train);

  std::ofstream os(fs::path(a.out_dir) / "sweep.csv");
  os << "hidden_size,grad_steps,final_success_ratio,final_median_distance\n";
  for (const auto& r : sw.rows) {
    if (r.failed) {
      std::fprintf(stderr, "sweep run (hidden %d, grad_steps %d) failed: %s\n", r.hidden_size,
                   r.grad_steps, r.error.c_str());
      os << r.hidden_size << ',' << r.grad_steps << ",nan,nan\n";
    } else {
      os << r.hidden_size << ',' << r.grad_steps << ',' << fmt17(r.final_row.success_ratio) << ','
         << fmt17(r.final_row.median_final_distance) << '\n';
    }
  }
  if (!os) throw std::runtime_error("cannot write sweep.csv");
  std::fprintf(stderr, "sweep done: %zu rows, IQR(final success) = %.4f\n", sw.rows.size(),
               sw.iqr_final_success);
  return 0;
}

int cmd_verify(int instances, long long seed, bool corrupt) {
  const Rng root((std::uint64_t)(seed >= 0 ? seed : 0));
  const FiniteMdp chain = make_chain(4, 3);
  int failures = 0;
  int nondegenerate = 0;

  std::printf("# surrogate-bound / relabel-inequality / identity / gap suite on chain(4), T=3\n");
  std::printf("%-5s %-20s %-9s %-9s %-9s %-9s %-6s\n", "idx", "seed", "J", "J_gcsl", "gap",
              "bound", "ok");
  for (int i = 0; i < instances; ++i) {
    const std::uint64_t iseed = root.child("instance", (std::uint64_t)i).seed();
    Rng rng(iseed);
    auto pi = TabularDistributionPolicy::random(chain, rng);
    auto pi_old = TabularDistributionPolicy::random(chain, rng);
    if (corrupt && i == 0) pi.row(0, 0, 1)[0] += 0.25;  // test hook: break normalization
    bool rows_valid = true;
    try {
      pi.check_rows(1e-9);
      pi_old.check_rows(1e-9);
    } catch (const std::exception&) {
      rows_valid = false;
    }
    const BoundReport rep = check_objective_bounds(pi, pi_old, chain);
    if (!rep.gap_degenerate) ++nondegenerate;
    const bool ok = rows_valid && rep.all_ok();
    if (!ok) ++failures;
    std::printf("%-5d %-20llu %-9.5f %-9.5f %-9.5f %-9.5f %s\n", i,
                (unsigned long long)iseed, rep.J, rep.J_gcsl, rep.gap, rep.gap_bound,
                ok ? "ok" : "FAIL");
  }
  if (nondegenerate < std::min(instances, 100)) {
    std::printf("too few nondegenerate gap instances: %d\n", nondegenerate);
    ++failures;
  }

  std::printf("# relabel-optimal policy suite (optimality gap, perturbation bound)\n");
  const FiniteMdp grid = make_grid3(4);
  const std::vector<double> eps = {0.05, 0.1, 0.25};
  for (const auto* m : {&chain, &grid}) {
    const auto uniform = TabularDistributionPolicy::uniform(*m);
    const RelabelOptimalityReport rep = check_relabel_optimality(*m, uniform, eps);
    const bool ok = rep.all_ok();
    if (!ok) ++failures;
    std::printf("states=%d J*=%.6f J(relabel)=%.6f perturbations=%zu %s\n", m->state_count,
                rep.j_star, rep.j_relabel_optimal, rep.perturbations.size(), ok ? "ok" : "FAIL");
  }

  std::printf("# relabel objective maximizer suite\n");
  int opt_checked = 0, opt_bad = 0;
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t oseed = root.child("optimality", (std::uint64_t)i).seed();
    Rng rng(oseed);
    const auto pi_old = TabularDistributionPolicy::random(chain, rng);
    const auto star = relabel_optimal_policy(pi_old, chain);
    const double base = exact_j_gcsl(star, pi_old, chain);
    for (int k = 0; k < 100; ++k) {
      const auto rand_pi = TabularDistributionPolicy::random(chain, rng);
      ++opt_checked;
      if (exact_j_gcsl(rand_pi, pi_old, chain) > base + 1e-9) {
        ++opt_bad;
        std::printf("maximizer violated at seed %llu trial %d\n", (unsigned long long)oseed, k);
      }
    }
  }
  std::printf("maximizer property: %d/%d ok\n", opt_checked - opt_bad, opt_checked);
  failures += opt_bad;

  if (failures == 0)
    std::printf("verify: all checks passed\n");
  else
    std::printf("verify: %d check(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}

int cmd_demos_generate(const std::string& env_name, int n, const std::string& out_path,
                       long long seed, bool force) {
  RunConfig cfg = default_run_config(env_name.empty() ? "grid-rooms" : env_name);
  const auto env = cfg.make_environment();
  const FiniteMdp* m = env->finite();
  if (!m || !m->deterministic())
    throw UsageError("demo generation needs a deterministic finite environment");
  if (fs::exists(out_path) && !force)
    throw UsageError("demo file '" + out_path + "' exists; pass --force");

  const OptimalReach expert = optimal_reach_policy(*m);
  const Rng root((std::uint64_t)(seed >= 0 ? seed : 0));
  std::vector<Trajectory> trajs;
  int reached = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng = root.child("demo", (std::uint64_t)i);
    const Goal g = env->sample_goal(rng);
    Trajectory tr = collect_trajectory(expert.policy, *env, g, CollectMode::greedy, 0.0, rng);
    reached += env->distance(tr.states.back(), g) == 0.0;
    trajs.push_back(std::move(tr));
  }
  save_trajectories(out_path, trajs);
  std::fprintf(stderr, "wrote %d expert trajectories (%d reach their goal) to %s\n", n, reached,
               out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal-conditioned supervised learning: training, evaluation and exact checks"};
  app.require_subcommand(1);

  CommonTrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a policy and write metrics + checkpoint");
  add_train_flags(train_cmd, train_args, false);

  CommonTrainArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand("ablate", "train with an ablation variant");
  add_train_flags(ablate_cmd, ablate_args, true);

  std::string eval_ckpt, eval_config, eval_env, eval_out;
  int eval_goals = 200;
  long long eval_seed = 0;
  bool eval_force = false;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on sampled goals");
  eval_cmd->add_option("--ckpt", eval_ckpt, "policy checkpoint")->required();
  eval_cmd->add_option("--config", eval_config, "config file for the environment");
  eval_cmd->add_option("--env", eval_env, "environment name");
  eval_cmd->add_option("--goals", eval_goals, "number of evaluation goals");
  eval_cmd->add_option("--seed", eval_seed, "evaluation RNG seed");
  eval_cmd->add_option("--out", eval_out, "directory for eval_episodes.csv");
  eval_cmd->add_flag("--force", eval_force, "allow overwriting existing results");

  CommonTrainArgs sweep_args;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "hidden-size x grad-steps grid, writes sweep.csv");
  add_train_flags(sweep_cmd, sweep_args, false);

  int verify_instances = 120;
  long long verify_seed = 0;
  bool verify_corrupt = false;
  auto* verify_cmd = app.add_subcommand("verify", "run the exact objective/bound check suite");
  verify_cmd->add_option("--instances", verify_instances, "random policy pairs to check");
  verify_cmd->add_option("--seed", verify_seed, "suite RNG seed");
  verify_cmd->add_flag("--corrupt", verify_corrupt, "inject a corrupted policy row (self-test)");

  auto* demos_cmd = app.add_subcommand("demos", "demonstration utilities");
  std::string demos_env = "grid-rooms", demos_out = "demos.bin";
  int demos_n = 200;
  long long demos_seed = 0;
  bool demos_force = false;
  auto* gen_cmd = demos_cmd->add_subcommand("generate", "write shortest-path expert trajectories");
  gen_cmd->add_option("--env", demos_env, "deterministic finite environment");
  gen_cmd->add_option("--n", demos_n, "number of trajectories");
  gen_cmd->add_option("--out", demos_out, "output trajectory log");
  gen_cmd->add_option("--seed", demos_seed, "generation RNG seed");
  gen_cmd->add_flag("--force", demos_force, "overwrite an existing file");
  demos_cmd->require_subcommand(1);

  try {
    app.parse(argc, argv);
    if (*train_cmd) return cmd_train(train_args);
    if (*ablate_cmd) return cmd_train(ablate_args);
    if (*eval_cmd)
      return cmd_eval(eval_ckpt, eval_config, eval_env, eval_goals, eval_seed, eval_out,
                      eval_force);
    if (*sweep_cmd) return cmd_sweep(sweep_args);
    if (*verify_cmd) return cmd_verify(verify_instances, verify_seed, verify_corrupt);
    if (*gen_cmd) return cmd_demos_generate(demos_env, demos_n, demos_out, demos_seed, demos_force);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
