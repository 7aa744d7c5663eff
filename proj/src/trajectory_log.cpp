#include "gcsl/trajectory_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gcsl {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void save_trajectories(const std::string& path, std::span<const Trajectory> trajs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trajectories: cannot open " + path);
  out << "# trajectory log v1\n";
  out << "# fields: seed T dim goal(dim) states((T+1)*dim) actions(T)\n";
  for (const Trajectory& tr : trajs) {
    tr.validate();
    const int T = tr.length();
    const int dim = static_cast<int>(tr.states[0].size());
    out << tr.seed << ' ' << T << ' ' << dim;
    for (double v : tr.commanded_goal) out << ' ' << fmt_double(v);
    for (const StateVec& s : tr.states)
      for (double v : s) out << ' ' << fmt_double(v);
    for (int a : tr.actions) out << ' ' << a;
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_trajectories: write failed for " + path);
}

std::vector<Trajectory> load_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_trajectories: cannot open " + path);
  std::vector<Trajectory> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream iss(line);
    Trajectory tr;
    int T = 0, dim = 0;
    if (!(iss >> tr.seed >> T >> dim)) fail(path, lineno, "malformed header fields");
    if (T < 1 || dim < 1) fail(path, lineno, "non-positive T or dim");
    auto read_vec = [&](StateVec& v) {
      v.resize(dim);
      for (int i = 0; i < dim; ++i)
        if (!(iss >> v[i])) fail(path, lineno, "truncated state/goal values");
    };
    read_vec(tr.commanded_goal);
    tr.states.resize(T + 1);
    for (StateVec& s : tr.states) read_vec(s);
    tr.actions.resize(T);
    for (int& a : tr.actions)
      if (!(iss >> a)) fail(path, lineno, "truncated action list");
    std::string rest;
    if (iss >> rest) fail(path, lineno, "trailing fields");
    tr.validate();
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace gcsl
