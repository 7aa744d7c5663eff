#include "gcsl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gcsl/mlp.hpp"

namespace gcsl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return (int)x;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  }
}

long long parse_i64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  }
}

double parse_f64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

// accepts "[400, 300]" or "400,300"
std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::string s = v;
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '[' || c == ']'; }), s.end());
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_int(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
  return out;
}

std::string fmt_f64(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "env.name") cfg.env_name = v;
  else if (key == "env.horizon") cfg.env_params.horizon = parse_int(key, v);
  else if (key == "env.step_scale") cfg.env_params.step_scale = parse_f64(key, v);
  else if (key == "env.door_width") cfg.env_params.door_width = parse_f64(key, v);
  else if (key == "env.goal_threshold") cfg.env_params.goal_threshold = parse_f64(key, v);
  else if (key == "policy.kind") {
    if (v != "auto" && v != "tabular" && v != "mlp")
      throw std::invalid_argument("config: policy.kind must be auto|tabular|mlp");
    cfg.policy_kind = v;
  } else if (key == "policy.hidden") cfg.hidden = parse_int_list(key, v);
  else if (key == "policy.time_varying") cfg.time_varying = parse_bool(key, v);
  else if (key == "policy.smoothing") cfg.smoothing = parse_f64(key, v);
  else if (key == "train.total_env_steps") cfg.train.total_env_steps = parse_i64(key, v);
  else if (key == "train.warmup_steps") cfg.train.warmup_steps = parse_i64(key, v);
  else if (key == "train.batch_size") cfg.train.batch_size = parse_int(key, v);
  else if (key == "train.grad_steps_per_env_step")
    cfg.train.grad_steps_per_env_step = parse_int(key, v);
  else if (key == "train.eval_every") cfg.train.eval_every = parse_i64(key, v);
  else if (key == "train.ablation") cfg.train.ablation = ablation_from_string(v);
  else if (key == "train.demo_path") cfg.train.demo_path = v;
  else if (key == "train.collect") cfg.train.collect = collect_mode_from_string(v);
  else if (key == "train.epsilon") cfg.train.epsilon = parse_f64(key, v);
  else if (key == "train.lr") cfg.train.lr = parse_f64(key, v);
  else if (key == "train.eval_goal_count") cfg.train.eval_goal_count = parse_int(key, v);
  else if (key == "train.h_max") cfg.train.h_max = parse_int(key, v);
  else if (key == "train.window_transitions")
    cfg.train.window_transitions = (std::size_t)parse_i64(key, v);
  else if (key == "train.seed" || key == "seed") cfg.train.seed = (std::uint64_t)parse_i64(key, v);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig default_run_config(const std::string& env_name) {
  RunConfig cfg;
  cfg.env_name = env_name;
  if (env_name == "grid-rooms") {
    cfg.time_varying = true;
    cfg.smoothing = 0.5;
    cfg.train.collect = CollectMode::sampled;
    cfg.train.total_env_steps = 199980;  // divisible by the 30-step horizon
    cfg.train.warmup_steps = 10020;
    cfg.train.eval_every = 10020;
  } else if (env_name == "four-rooms") {
    cfg.train.collect = CollectMode::greedy;
    cfg.train.total_env_steps = 300000;
    cfg.train.warmup_steps = 10000;
    cfg.train.eval_every = 10000;
  } else if (env_name == "chain") {
    cfg.time_varying = true;
    cfg.smoothing = 0.1;
    cfg.train.collect = CollectMode::sampled;
    cfg.train.total_env_steps = 30000;
    cfg.train.warmup_steps = 900;
    cfg.train.eval_every = 3000;
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open '" + path + "'");
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key = value: '" + line + "'");
    apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& key_value_pairs) {
  for (const auto& kv : key_value_pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must be key=value: '" + kv + "'");
    apply_setting(cfg, trim(kv.substr(0, eq)), kv.substr(eq + 1));
  }
}

std::unique_ptr<Env> RunConfig::make_environment() const { return make_env(env_name, env_params); }

std::unique_ptr<Policy> RunConfig::make_policy(const Env& env) const {
  const bool tv = time_varying || train.ablation == Ablation::time_varying;
  std::string kind = policy_kind;
  if (kind == "auto") kind = env.finite() ? "tabular" : "mlp";
  if (kind == "tabular") {
    const FiniteMdp* m = env.finite();
    if (!m) throw std::invalid_argument("config: tabular policy needs a finite environment");
    return std::make_unique<TabularPolicy>(m->state_count, m->action_count,
                                           tv ? m->horizon : 1, smoothing);
  }
  Rng init = Rng(train.seed).child("init");
  return std::make_unique<MlpPolicy>(env.codec(tv), hidden, env.spec().action_count, init);
}

std::map<std::string, std::string> RunConfig::items() const {
  std::map<std::string, std::string> m;
  m["env.name"] = env_name;
  m["env.horizon"] = std::to_string(env_params.horizon);
  m["env.step_scale"] = fmt_f64(env_params.step_scale);
  m["env.door_width"] = fmt_f64(env_params.door_width);
  m["env.goal_threshold"] = fmt_f64(env_params.goal_threshold);
  m["policy.kind"] = policy_kind;
  std::string h = "[";
  for (std::size_t i = 0; i < hidden.size(); ++i)
    h += (i ? ", " : "") + std::to_string(hidden[i]);
  m["policy.hidden"] = h + "]";
  m["policy.time_varying"] = time_varying ? "true" : "false";
  m["policy.smoothing"] = fmt_f64(smoothing);
  m["train.total_env_steps"] = std::to_string(train.total_env_steps);
  m["train.warmup_steps"] = std::to_string(train.warmup_steps);
  m["train.batch_size"] = std::to_string(train.batch_size);
  m["train.grad_steps_per_env_step"] = std::to_string(train.grad_steps_per_env_step);
  m["train.eval_every"] = std::to_string(train.eval_every);
  m["train.ablation"] = to_string(train.ablation);
  m["train.demo_path"] = train.demo_path;
  m["train.collect"] = to_string(train.collect);
  m["train.epsilon"] = fmt_f64(train.epsilon);
  m["train.lr"] = fmt_f64(train.lr);
  m["train.eval_goal_count"] = std::to_string(train.eval_goal_count);
  m["train.h_max"] = std::to_string(train.h_max);
  m["train.window_transitions"] = std::to_string(train.window_transitions);
  m["train.seed"] = std::to_string(train.seed);
  return m;
}

}  // namespace gcsl
