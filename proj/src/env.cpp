#include "gcsl/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gcsl {

namespace {

constexpr double kProbTol = 1e-12;

void check_distribution(const std::vector<double>& p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument(std::string(what) + ": negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbTol)
    throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
}

}  // namespace

int FiniteMdp::initial_state() const {
  for (int s = 0; s < state_count; ++s)
    if (initial_distribution[s] > 1.0 - kProbTol) return s;
  throw std::logic_error("initial_state: initial distribution is not a point mass");
}

void FiniteMdp::validate() const {
  if (state_count <= 0 || action_count < 2 || horizon < 1)
    throw std::invalid_argument("FiniteMdp: bad dimensions");
  const auto rows = static_cast<std::size_t>(state_count) * action_count;
  if (deterministic()) {
    if (next.size() != rows) throw std::invalid_argument("FiniteMdp: transition table size");
    for (int v : next)
      if (v < 0 || v >= state_count) throw std::invalid_argument("FiniteMdp: successor out of range");
  } else {
    if (succ_states.size() != rows || succ_probs.size() != rows)
      throw std::invalid_argument("FiniteMdp: successor table size");
    for (std::size_t i = 0; i < rows; ++i) {
      if (succ_states[i].size() != succ_probs[i].size() || succ_states[i].empty())
        throw std::invalid_argument("FiniteMdp: ragged successor row");
      for (int v : succ_states[i])
        if (v < 0 || v >= state_count) throw std::invalid_argument("FiniteMdp: successor out of range");
      check_distribution(succ_probs[i], "FiniteMdp transition row");
    }
  }
  if (static_cast<int>(initial_distribution.size()) != state_count)
    throw std::invalid_argument("FiniteMdp: initial distribution size");
  check_distribution(initial_distribution, "FiniteMdp initial distribution");
  if (static_cast<int>(goal_distribution.size()) != state_count)
    throw std::invalid_argument("FiniteMdp: goal distribution size");
  check_distribution(goal_distribution, "FiniteMdp goal distribution");
}

void encode_horizon(int h, int t_max, double* out) {
  if (h < 0 || h > t_max) throw std::invalid_argument("encode_horizon: h out of range");
  std::fill(out, out + t_max, 0.0);
  std::fill(out, out + h, 1.0);
}

void FeatureCodec::encode(const StateVec& s, const Goal& g, int horizon, double* out) const {
  const int w = feature_width();
  std::fill(out, out + dim(), 0.0);
  if (one_hot_states > 0) {
    const int sid = static_cast<int>(s.at(0));
    const int gid = static_cast<int>(g.at(0));
    if (sid < 0 || sid >= one_hot_states || gid < 0 || gid >= one_hot_states)
      throw std::invalid_argument("FeatureCodec: id out of one-hot range");
    out[sid] = 1.0;
    out[w + gid] = 1.0;
  } else {
    if (static_cast<int>(s.size()) != state_dim || static_cast<int>(g.size()) != state_dim)
      throw std::invalid_argument("FeatureCodec: dimension mismatch");
    std::copy(s.begin(), s.end(), out);
    std::copy(g.begin(), g.end(), out + w);
  }
  if (horizon_len > 0) encode_horizon(horizon, horizon_len, out + 2 * w);
}

FeatureCodec Env::codec(bool time_varying) const {
  FeatureCodec c;
  if (const FiniteMdp* m = finite()) {
    c.state_dim = 1;
    c.one_hot_states = m->state_count;
  } else {
    c.state_dim = spec_.state_dim;
  }
  c.horizon_len = time_varying ? spec_.horizon : 0;
  return c;
}

// ---------------------------------------------------------------------------
// continuous four-room

FourRoomsEnv::FourRoomsEnv(Params p) : p_(p) {
  if (p_.horizon < 1 || p_.step_scale <= 0.0 || p_.door_width <= 0.0 || p_.door_width >= 0.5)
    throw std::invalid_argument("FourRoomsEnv: bad parameters");
  spec_ = EnvSpec{p_.horizon, 9, 2, p_.goal_threshold};
  name_ = "four-rooms";

  const double w = p_.wall_half_thickness;
  const double hw = p_.door_width / 2.0;
  // vertical wall band at x=0.5, doors centered at y=0.25 and y=0.75
  walls_.push_back({0.5 - w, 0.5 + w, 0.0, 0.25 - hw});
  walls_.push_back({0.5 - w, 0.5 + w, 0.25 + hw, 0.75 - hw});
  walls_.push_back({0.5 - w, 0.5 + w, 0.75 + hw, 1.0});
  // horizontal wall band at y=0.5, doors centered at x=0.25 and x=0.75
  walls_.push_back({0.0, 0.25 - hw, 0.5 - w, 0.5 + w});
  walls_.push_back({0.25 + hw, 0.75 - hw, 0.5 - w, 0.5 + w});
  walls_.push_back({0.75 + hw, 1.0, 0.5 - w, 0.5 + w});

  // {-1,0,+1}^2, lexicographic: index 0 = (-1,-1), 4 = (0,0), 8 = (+1,+1)
  for (int ix = -1; ix <= 1; ++ix)
    for (int iy = -1; iy <= 1; ++iy)
      actions_.push_back({static_cast<double>(ix), static_cast<double>(iy)});
}

StateVec FourRoomsEnv::reset(Rng&) const { return {0.25, 0.25}; }

bool FourRoomsEnv::in_wall(double x, double y) const {
  for (const Rect& r : walls_)
    if (x > r.x0 && x < r.x1 && y > r.y0 && y < r.y1) return true;
  return false;
}

// Move one coordinate from `from` toward `to` with the other coordinate held
// at `other`; stops at the first wall face in the way. Positions on a wall
// face are legal, the open interior of a slab is not.
double FourRoomsEnv::slide_axis(double from, double to, double other, bool moving_in_x) const {
  to = std::clamp(to, 0.0, 1.0);
  for (const Rect& r : walls_) {
    const double lo = moving_in_x ? r.x0 : r.y0;
    const double hi = moving_in_x ? r.x1 : r.y1;
    const double olo = moving_in_x ? r.y0 : r.x0;
    const double ohi = moving_in_x ? r.y1 : r.x1;
    if (!(other > olo && other < ohi)) continue;  // slab not in this lane
    if (to > from) {
      if (from <= lo && to > lo) to = lo;
    } else if (to < from) {
      if (from >= hi && to < hi) to = hi;
    }
  }
  return to;
}

StateVec FourRoomsEnv::step(const StateVec& s, int action, Rng&) const {
  if (action < 0 || action >= spec_.action_count)
    throw std::invalid_argument("FourRoomsEnv::step: invalid action index");
  if (s.size() != 2) throw std::invalid_argument("FourRoomsEnv::step: state dimension");
  const auto& a = actions_[action];
  const double nx = slide_axis(s[0], s[0] + p_.step_scale * a[0], s[1], true);
  const double ny = slide_axis(s[1], s[1] + p_.step_scale * a[1], nx, false);
  return {nx, ny};
}

Goal FourRoomsEnv::sample_goal(Rng& rng) const {
  // rejection over the unit square; wall slabs are a ~2% sliver
  for (int tries = 0; tries < 10000; ++tries) {
    const double x = rng.uniform01();
    const double y = rng.uniform01();
    if (!in_wall(x, y)) return {x, y};
  }
  throw std::logic_error("FourRoomsEnv::sample_goal: rejection sampling failed");
}

double FourRoomsEnv::distance(const StateVec& s, const Goal& g) const {
  if (s.size() != g.size()) throw std::invalid_argument("distance: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += (s[i] - g[i]) * (s[i] - g[i]);
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// finite MDPs

FiniteEnv::FiniteEnv(FiniteMdp mdp, std::string name, double goal_threshold)
    : mdp_(std::move(mdp)) {
  mdp_.validate();
  spec_ = EnvSpec{mdp_.horizon, mdp_.action_count, 1, goal_threshold};
  name_ = std::move(name);
}

int FiniteEnv::state_id(const StateVec& s) const {
  if (s.size() != 1) throw std::invalid_argument("FiniteEnv: state must be a single id");
  const int id = static_cast<int>(std::lround(s[0]));
  if (id < 0 || id >= mdp_.state_count) throw std::invalid_argument("FiniteEnv: id out of range");
  return id;
}

StateVec FiniteEnv::reset(Rng& rng) const {
  for (int s = 0; s < mdp_.state_count; ++s)
    if (mdp_.initial_distribution[s] > 1.0 - 1e-12) return {static_cast<double>(s)};
  return {static_cast<double>(rng.categorical(mdp_.initial_distribution))};
}

StateVec FiniteEnv::step(const StateVec& s, int action, Rng& rng) const {
  if (action < 0 || action >= mdp_.action_count)
    throw std::invalid_argument("FiniteEnv::step: invalid action index");
  const int id = state_id(s);
  if (mdp_.deterministic()) return {static_cast<double>(mdp_.step(id, action))};
  const auto row = static_cast<std::size_t>(id) * mdp_.action_count + action;
  const int k = rng.categorical(mdp_.succ_probs[row]);
  return {static_cast<double>(mdp_.succ_states[row][k])};
}

Goal FiniteEnv::sample_goal(Rng& rng) const {
  return {static_cast<double>(rng.categorical(mdp_.goal_distribution))};
}

double FiniteEnv::distance(const StateVec& s, const Goal& g) const {
  if (s.size() != g.size()) throw std::invalid_argument("distance: dimension mismatch");
  return state_id(s) == state_id(g) ? 0.0 : 1.0;
}

FiniteMdp make_chain(int n_states, int horizon) {
  if (n_states < 2) throw std::invalid_argument("make_chain: need at least 2 states");
  FiniteMdp m;
  m.state_count = n_states;
  m.action_count = 3;  // 0=left, 1=stay, 2=right, clamped at the ends
  m.horizon = horizon;
  m.next.resize(static_cast<std::size_t>(n_states) * 3);
  for (int s = 0; s < n_states; ++s) {
    m.next[s * 3 + 0] = std::max(0, s - 1);
    m.next[s * 3 + 1] = s;
    m.next[s * 3 + 2] = std::min(n_states - 1, s + 1);
  }
  m.initial_distribution.assign(n_states, 0.0);
  m.initial_distribution[0] = 1.0;
  m.goal_distribution.assign(n_states, 1.0 / n_states);
  m.validate();
  return m;
}

FiniteMdp make_noisy_chain(int n_states, int horizon, double slip) {
  if (slip < 0.0 || slip > 1.0) throw std::invalid_argument("make_noisy_chain: slip in [0,1]");
  FiniteMdp base = make_chain(n_states, horizon);
  FiniteMdp m = base;
  m.next.clear();
  const int A = m.action_count;
  m.succ_states.resize(static_cast<std::size_t>(n_states) * A);
  m.succ_probs.resize(m.succ_states.size());
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < A; ++a) {
      std::vector<double> mass(n_states, 0.0);
      for (int actual = 0; actual < A; ++actual) {
        const double p = (actual == a ? 1.0 - slip : 0.0) + slip / A;
        mass[base.step(s, actual)] += p;
      }
      auto& ss = m.succ_states[s * A + a];
      auto& sp = m.succ_probs[s * A + a];
      for (int t = 0; t < n_states; ++t) {
        if (mass[t] > 0.0) {
          ss.push_back(t);
          sp.push_back(mass[t]);
        }
      }
    }
  }
  m.validate();
  return m;
}

namespace {

// grid actions shared by grid-rooms and the 3x3 grid:
// 0=stay, 1=up, 2=down, 3=left, 4=right; blocked moves stay put
constexpr int kGridDr[5] = {0, -1, 1, 0, 0};
constexpr int kGridDc[5] = {0, 0, 0, -1, 1};

GridRoomsLayout build_grid_rooms_layout() {
  GridRoomsLayout L;
  for (int r = 0; r < L.rows; ++r)
    for (int c = 0; c < L.cols; ++c)
      if (!L.is_wall(r, c)) {
        L.ids[{r, c}] = static_cast<int>(L.cells.size());
        L.cells.emplace_back(r, c);
      }
  L.start_cell = L.ids.at({6, 4});
  return L;
}

}  // namespace

bool GridRoomsLayout::is_wall(int r, int c) const {
  if (r == 5 && c != 2 && c != 8) return true;  // horizontal wall, doors at columns 2 and 8
  if (c == 5 && r != 2 && r != 8) return true;  // vertical wall, doors at rows 2 and 8
  return false;
}

const GridRoomsLayout& grid_rooms_layout() {
  static const GridRoomsLayout layout = build_grid_rooms_layout();
  return layout;
}

FiniteMdp make_grid_rooms(int horizon) {
  const GridRoomsLayout& L = grid_rooms_layout();
  const int S = static_cast<int>(L.cells.size());
  FiniteMdp m;
  m.state_count = S;
  m.action_count = 5;
  m.horizon = horizon;
  m.next.resize(static_cast<std::size_t>(S) * 5);
  for (int id = 0; id < S; ++id) {
    const auto [r, c] = L.cells[id];
    for (int a = 0; a < 5; ++a) {
      const int nr = r + kGridDr[a];
      const int nc = c + kGridDc[a];
      const bool ok = nr >= 0 && nr < L.rows && nc >= 0 && nc < L.cols && !L.is_wall(nr, nc);
      m.next[id * 5 + a] = ok ? L.id(nr, nc) : id;
    }
  }
  m.initial_distribution.assign(S, 0.0);
  m.initial_distribution[L.start_cell] = 1.0;
  m.goal_distribution.assign(S, 1.0 / S);
  m.validate();
  return m;
}

FiniteMdp make_grid3(int horizon) {
  FiniteMdp m;
  m.state_count = 9;
  m.action_count = 5;
  m.horizon = horizon;
  m.next.resize(9 * 5);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int id = r * 3 + c;
      for (int a = 0; a < 5; ++a) {
        const int nr = r + kGridDr[a];
        const int nc = c + kGridDc[a];
        const bool ok = nr >= 0 && nr < 3 && nc >= 0 && nc < 3;
        m.next[id * 5 + a] = ok ? nr * 3 + nc : id;
      }
    }
  }
  m.initial_distribution.assign(9, 0.0);
  m.initial_distribution[0] = 1.0;  // top-left corner
  m.goal_distribution.assign(9, 1.0 / 9.0);
  m.validate();
  return m;
}

std::unique_ptr<Env> make_env(const std::string& name, const EnvParams& params) {
  if (name == "four-rooms") {
    FourRoomsEnv::Params p;
    if (params.horizon > 0) p.horizon = params.horizon;
    p.step_scale = params.step_scale;
    p.door_width = params.door_width;
    p.goal_threshold = params.goal_threshold;
    return std::make_unique<FourRoomsEnv>(p);
  }
  if (name == "grid-rooms")
    return std::make_unique<FiniteEnv>(make_grid_rooms(params.horizon > 0 ? params.horizon : 30),
                                       name, params.goal_threshold);
  if (name == "chain")
    return std::make_unique<FiniteEnv>(make_chain(4, params.horizon > 0 ? params.horizon : 3),
                                       name, params.goal_threshold);
  throw std::invalid_argument("make_env: unknown environment '" + name + "'");
}

}  // namespace gcsl
