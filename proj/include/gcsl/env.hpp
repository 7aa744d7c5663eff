#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gcsl/rng.hpp"

namespace gcsl {

using StateVec = std::vector<double>;
using Goal = std::vector<double>;

struct EnvSpec {
  int horizon = 50;
  int action_count = 0;
  int state_dim = 0;
  double goal_threshold = 0.1;
};

// Finite-horizon MDP given by explicit tables. Deterministic unless
// succ_states is non-empty, in which case each (s,a) row is a distribution.
struct FiniteMdp {
  int state_count = 0;
  int action_count = 0;
  int horizon = 0;
  std::vector<int> next;                        // [s*A + a], deterministic case
  std::vector<std::vector<int>> succ_states;    // [s*A + a], stochastic case
  std::vector<std::vector<double>> succ_probs;  //   parallel to succ_states
  std::vector<double> initial_distribution;     // over states (point mass for built-ins)
  std::vector<double> goal_distribution;        // p(g) over states

  bool deterministic() const { return succ_states.empty(); }
  int step(int s, int a) const { return next[s * action_count + a]; }
  int initial_state() const;  // requires a point-mass initial distribution
  void validate() const;      // throws std::invalid_argument on malformed tables
};

// How states/goals (and optionally the remaining horizon) are packed into an
// MLP input row. Finite envs one-hot their ids; continuous envs pass raw
// coordinates. The horizon is a thermometer code: ones in positions [0, h).
struct FeatureCodec {
  int state_dim = 0;       // raw coordinate count (continuous) or 1 (finite)
  int one_hot_states = 0;  // >0: state/goal are ids one-hot encoded to this width
  int horizon_len = 0;     // >0: append thermometer encoding of this length

  int feature_width() const { return one_hot_states > 0 ? one_hot_states : state_dim; }
  int dim() const { return 2 * feature_width() + horizon_len; }
  void encode(const StateVec& s, const Goal& g, int horizon, double* out) const;
};

void encode_horizon(int h, int t_max, double* out);  // thermometer: out[0..h) = 1

class Env {
 public:
  virtual ~Env() = default;

  const EnvSpec& spec() const { return spec_; }
  const std::string& name() const { return name_; }

  virtual StateVec reset(Rng& rng) const = 0;
  virtual StateVec step(const StateVec& s, int action, Rng& rng) const = 0;
  virtual Goal sample_goal(Rng& rng) const = 0;
  virtual double distance(const StateVec& s, const Goal& g) const = 0;

  // null for continuous environments
  virtual const FiniteMdp* finite() const { return nullptr; }

  FeatureCodec codec(bool time_varying) const;

 protected:
  EnvSpec spec_;
  std::string name_;
};

// Continuous four-room navigation on [0,1]^2: interior walls along x=0.5 and
// y=0.5 with one door centered in each half-wall, 3^2 grid of unit moves
// scaled by step_scale, movement clipped (not reflected) against walls.
class FourRoomsEnv : public Env {
 public:
  struct Params {
    int horizon = 50;
    double step_scale = 0.05;
    double door_width = 0.12;
    double wall_half_thickness = 0.01;
    double goal_threshold = 0.1;
  };

  explicit FourRoomsEnv(Params p);
  FourRoomsEnv() : FourRoomsEnv(Params{}) {}

  StateVec reset(Rng& rng) const override;
  StateVec step(const StateVec& s, int action, Rng& rng) const override;
  Goal sample_goal(Rng& rng) const override;
  double distance(const StateVec& s, const Goal& g) const override;

  bool in_wall(double x, double y) const;  // strictly inside a wall slab
  const std::array<double, 2>& action_vector(int a) const { return actions_[a]; }

 private:
  double slide_axis(double from, double to, double other, bool moving_in_x) const;

  struct Rect {
    double x0, x1, y0, y1;
  };
  Params p_;
  std::vector<Rect> walls_;
  std::vector<std::array<double, 2>> actions_;
};

// Finite MDP behind the common Env interface. States and goals travel as
// 1-vectors holding the id; distance is the 0/1 discrete metric.
class FiniteEnv : public Env {
 public:
  FiniteEnv(FiniteMdp mdp, std::string name, double goal_threshold = 0.1);

  StateVec reset(Rng& rng) const override;
  StateVec step(const StateVec& s, int action, Rng& rng) const override;
  Goal sample_goal(Rng& rng) const override;
  double distance(const StateVec& s, const Goal& g) const override;
  const FiniteMdp* finite() const override { return &mdp_; }

  int state_id(const StateVec& s) const;

 private:
  FiniteMdp mdp_;
};

// 11x11 four-room gridworld layout: interior walls on row 5 and column 5 with
// two doors each. 104 free cells.
struct GridRoomsLayout {
  int rows = 11;
  int cols = 11;
  std::vector<std::pair<int, int>> cells;  // free-cell id -> (row, col)
  std::map<std::pair<int, int>, int> ids;
  int start_cell = 0;

  bool is_wall(int r, int c) const;
  int id(int r, int c) const { return ids.at({r, c}); }
};

const GridRoomsLayout& grid_rooms_layout();

FiniteMdp make_chain(int n_states = 4, int horizon = 3);
FiniteMdp make_grid_rooms(int horizon = 30);
FiniteMdp make_grid3(int horizon = 4);  // 3x3 open gridworld, enumeration-sized
// chain where each action "slips" to a uniform random action with probability
// `slip` (exercises the stochastic-dynamics paths of the oracles)
FiniteMdp make_noisy_chain(int n_states, int horizon, double slip);

struct EnvParams {
  int horizon = -1;  // -1: environment default
  double step_scale = 0.05;
  double door_width = 0.12;
  double goal_threshold = 0.1;
};

// name in {"four-rooms", "grid-rooms", "chain"}
std::unique_ptr<Env> make_env(const std::string& name, const EnvParams& params = {});

}  // namespace gcsl
