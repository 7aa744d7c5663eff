// End-to-end checks of the command-line binary: spawns the real executable
// and inspects exit codes plus the files it leaves behind.
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gcsl/checkpoint.hpp"
#include "gcsl/trajectory_log.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr interleaved
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(GCSL_CLI_PATH) + " " + args + " 2>&1";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.output.append(buf, n);
  const int st = pclose(p);
  r.exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path fresh_dir(const char* name) {
  const auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("train subcommand produces metrics, checkpoint and manifest") {
  const auto out = fresh_dir("gcsl_cli_train");
  const std::string args =
      "train --env grid-rooms --seed 7 --steps 600 --set train.warmup_steps=300 "
      "--set train.eval_every=300 --set train.eval_goal_count=20 --out " +
      out.string();
  auto r = run_cli(args);
  CHECK(r.exit_code == 0);

  const auto metrics = slurp(out / "metrics.csv");
  CHECK(metrics.rfind("env_steps,median_final_distance,success_ratio,mean_training_loss\n", 0) ==
        0);
  CHECK(count_lines(metrics) >= 3);  // header + eval rows at 300 and 600

  const auto ckpt = gcsl::load_checkpoint((out / "policy.ckpt").string());
  CHECK(dynamic_cast<gcsl::TabularPolicy*>(ckpt.get()) != nullptr);

  const auto manifest = nlohmann::json::parse(slurp(out / "run.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["config"]["env.name"] == "grid-rooms");
  CHECK(manifest["env_steps"] == 600);
  CHECK(manifest.contains("git_describe"));

  // refusing to clobber an existing run is a usage error...
  auto again = run_cli(args);
  CHECK(again.exit_code == 2);
  // ...unless forced
  auto forced = run_cli(args + " --force");
  CHECK(forced.exit_code == 0);
  fs::remove_all(out);
}

TEST_CASE("bad invocations exit with code 2 and say why") {
  const auto out = fresh_dir("gcsl_cli_bad");
  auto missing = run_cli("train --config /nonexistent/run.cfg --out " + out.string());
  CHECK(missing.exit_code == 2);
  CHECK(missing.output.find("/nonexistent/run.cfg") != std::string::npos);

  auto badkey = run_cli("train --env chain --steps 30 --set train.gamma=0.9 --out " + out.string());
  CHECK(badkey.exit_code == 2);
  CHECK(badkey.output.find("train.gamma") != std::string::npos);

  auto noablation = run_cli("ablate --env chain --steps 30 --out " + out.string());
  CHECK(noablation.exit_code != 0);
  fs::remove_all(out);
}

TEST_CASE("ablate subcommand records its variant in the manifest") {
  const auto out = fresh_dir("gcsl_cli_ablate");
  auto r = run_cli(
      "ablate --env chain --seed 1 --steps 90 --ablation limited-relabel "
      "--set train.warmup_steps=30 --set train.eval_every=45 "
      "--set train.eval_goal_count=10 --out " +
      out.string());
  CHECK(r.exit_code == 0);
  const auto manifest = nlohmann::json::parse(slurp(out / "run.json"));
  CHECK(manifest["config"]["train.ablation"] == "limited_relabel");
  fs::remove_all(out);
}

TEST_CASE("verify subcommand passes clean and fails when corrupted") {
  auto ok = run_cli("verify --instances 5 --seed 3");
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("all checks passed") != std::string::npos);
  // one table row per instance, each ending in ok/FAIL
  int rows = 0;
  std::istringstream is(ok.output);
  for (std::string line; std::getline(is, line);)
    if (line.rfind("#", 0) != 0 && line.find(" ok") != std::string::npos &&
        line.find("seed") == std::string::npos)
      ++rows;
  CHECK(rows >= 5);

  auto corrupt = run_cli("verify --instances 5 --seed 3 --corrupt");
  CHECK(corrupt.exit_code == 1);
  CHECK(corrupt.output.find("FAIL") != std::string::npos);

  auto repro = run_cli("verify --instances 5 --seed 3");
  CHECK(repro.output == ok.output);
}

TEST_CASE("demos generate writes expert trajectories that reach their goals") {
  const auto file = fs::temp_directory_path() / "gcsl_cli_demos.log";
  fs::remove(file);
  auto r = run_cli("demos generate --env chain --n 5 --seed 11 --out " + file.string());
  CHECK(r.exit_code == 0);
  const auto trajs = gcsl::load_trajectories(file.string());
  REQUIRE(trajs.size() == 5);
  for (const auto& tr : trajs) {
    REQUIRE(!tr.states.empty());
    CHECK(tr.states.back() == tr.commanded_goal);
  }
  // refuses to clobber without --force
  auto again = run_cli("demos generate --env chain --n 5 --seed 11 --out " + file.string());
  CHECK(again.exit_code == 2);
  // continuous spaces have no exact expert
  auto cont = run_cli("demos generate --env four-rooms --n 3 --out " + file.string() + ".x");
  CHECK(cont.exit_code == 2);
  fs::remove(file);
}

TEST_CASE("eval subcommand reloads a checkpoint and reports per-episode rows") {
  const auto out = fresh_dir("gcsl_cli_eval");
  auto tr = run_cli(
      "train --env chain --seed 2 --steps 300 --set train.warmup_steps=60 "
      "--set train.eval_every=150 --set train.eval_goal_count=10 --out " +
      out.string());
  REQUIRE(tr.exit_code == 0);

  const auto evout = fresh_dir("gcsl_cli_eval_out");
  auto ev = run_cli("eval --ckpt " + (out / "policy.ckpt").string() +
                    " --env chain --goals 25 --seed 5 --out " + evout.string());
  CHECK(ev.exit_code == 0);
  CHECK(ev.output.find("success_ratio") != std::string::npos);

  const auto rows = slurp(evout / "eval_episodes.csv");
  CHECK(rows.rfind("goal,final_distance,success\n", 0) == 0);
  CHECK(count_lines(rows) == 26);  // header + one row per goal

  auto ev2 =
      run_cli("eval --ckpt " + (out / "policy.ckpt").string() + " --env chain --goals 25 --seed 5");
  CHECK(ev2.output == ev.output);  // seeded eval is deterministic
  fs::remove_all(out);
  fs::remove_all(evout);
}

TEST_CASE("sweep subcommand emits one csv row per grid cell") {
  const auto out = fresh_dir("gcsl_cli_sweep");
  auto r = run_cli(
      "sweep --env chain --seed 4 --steps 30 --set train.warmup_steps=9 "
      "--set train.batch_size=4 --set train.eval_every=15 "
      "--set train.eval_goal_count=5 --out " +
      out.string());
  CHECK(r.exit_code == 0);
  const auto csv = slurp(out / "sweep.csv");
  CHECK(csv.rfind("hidden_size,grad_steps,final_success_ratio,final_median_distance\n", 0) == 0);
  CHECK(count_lines(csv) == 10);  // header + 3x3 grid
  fs::remove_all(out);
}
