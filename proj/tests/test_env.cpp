#include <doctest.h>

#include <cmath>
#include <set>

#include "gcsl/env.hpp"

using namespace gcsl;

TEST_CASE("four-rooms: free-space step is a pure translation") {
  FourRoomsEnv env;
  Rng rng(0);
  // action index 7 = (+1, 0) in the lexicographic {-1,0,+1}^2 grid
  const StateVec next = env.step({0.25, 0.25}, 7, rng);
  CHECK(next[0] == doctest::Approx(0.30).epsilon(1e-12));
  CHECK(next[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("four-rooms: action grid layout") {
  FourRoomsEnv env;
  CHECK(env.spec().action_count == 9);
  CHECK(env.action_vector(0) == std::array<double, 2>{-1.0, -1.0});
  CHECK(env.action_vector(4) == std::array<double, 2>{0.0, 0.0});
  CHECK(env.action_vector(8) == std::array<double, 2>{1.0, 1.0});
  int zeros = 0;
  for (int a = 0; a < 9; ++a)
    zeros += env.action_vector(a)[0] == 0.0 && env.action_vector(a)[1] == 0.0;
  CHECK(zeros == 1);
  Rng rng(0);
  CHECK_THROWS(env.step({0.25, 0.25}, 9, rng));
  CHECK_THROWS(env.step({0.25, 0.25}, -1, rng));
}

TEST_CASE("four-rooms: wall blocks one axis, the other still moves") {
  FourRoomsEnv env;
  Rng rng(0);
  // just left of the vertical wall, away from the doors; push right+up (idx 8)
  const StateVec s = {0.49, 0.40};
  const StateVec next = env.step(s, 8, rng);
  CHECK(next[0] == doctest::Approx(0.49));  // blocked at the face
  CHECK(next[1] == doctest::Approx(0.45));  // free axis moves
}

TEST_CASE("four-rooms: outer boundary clips") {
  FourRoomsEnv env;
  Rng rng(0);
  const StateVec next = env.step({0.02, 0.98}, 2, rng);  // (-1, +1)
  CHECK(next[0] == doctest::Approx(0.0));
  CHECK(next[1] == doctest::Approx(1.0));
}

TEST_CASE("four-rooms: agent passes through a door") {
  FourRoomsEnv env;
  Rng rng(0);
  StateVec s = {0.45, 0.25};  // lower door is centered at y=0.25
  for (int i = 0; i < 4; ++i) s = env.step(s, 7, rng);
  CHECK(s[0] == doctest::Approx(0.65));
  CHECK(s[1] == doctest::Approx(0.25));
}

TEST_CASE("four-rooms: containment under random walks") {
  FourRoomsEnv env;
  Rng rng(314);
  StateVec s = env.reset(rng);
  for (int i = 0; i < 20000; ++i) {
    s = env.step(s, rng.uniform_int(9), rng);
    REQUIRE(s[0] >= 0.0);
    REQUIRE(s[0] <= 1.0);
    REQUIRE(s[1] >= 0.0);
    REQUIRE(s[1] <= 1.0);
    REQUIRE_FALSE(env.in_wall(s[0], s[1]));
  }
}

TEST_CASE("four-rooms: reset is a point mass") {
  FourRoomsEnv env;
  Rng a(1), b(999);
  CHECK(env.reset(a) == StateVec{0.25, 0.25});
  CHECK(env.reset(b) == StateVec{0.25, 0.25});
}

TEST_CASE("four-rooms: goals uniform across the four rooms, never in a wall") {
  FourRoomsEnv env;
  Rng rng(11);
  int quadrant[2][2] = {};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Goal g = env.sample_goal(rng);
    REQUIRE_FALSE(env.in_wall(g[0], g[1]));
    quadrant[g[0] > 0.5][g[1] > 0.5]++;
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(quadrant[i][j] / static_cast<double>(n) - 0.25) < 0.01);
}

TEST_CASE("four-rooms: euclidean distance") {
  FourRoomsEnv env;
  CHECK(env.distance({0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(env.distance({0.3, 0.7}, {0.3, 0.7}) == 0.0);
  CHECK_THROWS(env.distance({0.0, 0.0}, {1.0}));
}

TEST_CASE("four-rooms: deterministic state sequence for a fixed action list") {
  FourRoomsEnv env;
  Rng seq(5);
  std::vector<int> actions;
  for (int i = 0; i < 200; ++i) actions.push_back(seq.uniform_int(9));
  Rng r1(0), r2(0);
  StateVec a = env.reset(r1), b = env.reset(r2);
  for (int act : actions) {
    a = env.step(a, act, r1);
    b = env.step(b, act, r2);
    REQUIRE(a == b);  // bit-identical
  }
}

TEST_CASE("chain: table lookups and clamped ends") {
  const FiniteMdp m = make_chain(4, 3);
  CHECK(m.step(1, 2) == 2);  // right
  CHECK(m.step(1, 0) == 0);  // left
  CHECK(m.step(1, 1) == 1);  // stay
  CHECK(m.step(0, 0) == 0);  // clamped
  CHECK(m.step(3, 2) == 3);  // clamped
  CHECK(m.initial_state() == 0);
}

TEST_CASE("chain env: uniform goals and 0/1 distance") {
  FiniteEnv env(make_chain(4, 3), "chain");
  Rng rng(3);
  std::array<int, 4> hist{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) hist[static_cast<int>(env.sample_goal(rng)[0])]++;
  for (int c : hist) CHECK(std::abs(c / static_cast<double>(n) - 0.25) < 0.01);
  CHECK(env.distance({2.0}, {3.0}) == 1.0);
  CHECK(env.distance({2.0}, {2.0}) == 0.0);
}

TEST_CASE("grid-rooms: layout and step table") {
  const GridRoomsLayout& L = grid_rooms_layout();
  CHECK(L.cells.size() == 104);  // 121 cells minus 17 wall cells
  const FiniteMdp m = make_grid_rooms();
  CHECK(m.state_count == 104);
  CHECK(m.action_count == 5);
  CHECK(m.horizon == 30);
  CHECK(m.initial_state() == L.ids.at({6, 4}));  // interior start, near two doors
  CHECK(m.step(m.initial_state(), 0) == m.initial_state());  // action 0 = stay

  // step agrees with the layout geometry for every (state, action)
  for (int id = 0; id < m.state_count; ++id) {
    const auto [r, c] = L.cells[id];
    const int dr[5] = {0, -1, 1, 0, 0};
    const int dc[5] = {0, 0, 0, -1, 1};
    for (int a = 0; a < 5; ++a) {
      const int nr = r + dr[a], nc = c + dc[a];
      const bool ok = nr >= 0 && nr < 11 && nc >= 0 && nc < 11 && !L.is_wall(nr, nc);
      REQUIRE(m.step(id, a) == (ok ? L.id(nr, nc) : id));
    }
  }
}

TEST_CASE("grid-rooms: every goal is a free cell") {
  FiniteEnv env(make_grid_rooms(), "grid-rooms");
  Rng rng(8);
  for (int i = 0; i < 100000; ++i) {
    const int id = static_cast<int>(env.sample_goal(rng)[0]);
    REQUIRE(id >= 0);
    REQUIRE(id < 104);
  }
}

TEST_CASE("grid-rooms: all cells reachable from the start within the horizon") {
  const FiniteMdp m = make_grid_rooms();
  std::vector<int> dist(m.state_count, -1);
  std::vector<int> frontier = {m.initial_state()};
  dist[m.initial_state()] = 0;
  int depth = 0;
  while (!frontier.empty()) {
    ++depth;
    std::vector<int> next_frontier;
    for (int s : frontier)
      for (int a = 0; a < m.action_count; ++a) {
        const int t = m.step(s, a);
        if (dist[t] < 0) {
          dist[t] = depth;
          next_frontier.push_back(t);
        }
      }
    frontier = std::move(next_frontier);
  }
  int max_dist = 0;
  for (int d : dist) {
    REQUIRE(d >= 0);
    max_dist = std::max(max_dist, d);
  }
  CHECK(max_dist <= m.horizon);
}

TEST_CASE("noisy chain: valid stochastic rows that mix states") {
  const FiniteMdp m = make_noisy_chain(4, 3, 0.3);
  CHECK_FALSE(m.deterministic());
  m.validate();
  // from state 1, action right: mass on 0, 1 and 2
  const auto& row = m.succ_states[1 * 3 + 2];
  CHECK(row.size() == 3);
}

TEST_CASE("horizon thermometer encoding") {
  double buf[4];
  encode_horizon(0, 4, buf);
  CHECK(std::vector<double>(buf, buf + 4) == std::vector<double>{0, 0, 0, 0});
  encode_horizon(4, 4, buf);
  CHECK(std::vector<double>(buf, buf + 4) == std::vector<double>{1, 1, 1, 1});
  encode_horizon(2, 4, buf);
  CHECK(std::vector<double>(buf, buf + 4) == std::vector<double>{1, 1, 0, 0});
  CHECK_THROWS(encode_horizon(5, 4, buf));
  CHECK_THROWS(encode_horizon(-1, 4, buf));
}

TEST_CASE("feature codec: one-hot ids for finite envs, raw coords for continuous") {
  FiniteEnv chain(make_chain(4, 3), "chain");
  const FeatureCodec fc = chain.codec(false);
  CHECK(fc.dim() == 8);
  std::vector<double> row(fc.dim());
  fc.encode({2.0}, {0.0}, 1, row.data());
  CHECK(row == std::vector<double>{0, 0, 1, 0, 1, 0, 0, 0});

  FourRoomsEnv fr;
  const FeatureCodec cc = fr.codec(true);
  CHECK(cc.dim() == 2 + 2 + 50);
  std::vector<double> crow(cc.dim());
  cc.encode({0.1, 0.2}, {0.3, 0.4}, 3, crow.data());
  CHECK(crow[0] == 0.1);
  CHECK(crow[3] == 0.4);
  CHECK(crow[4] == 1.0);
  CHECK(crow[6] == 1.0);
  CHECK(crow[7] == 0.0);
}

TEST_CASE("make_env: names, overrides, unknown name") {
  CHECK(make_env("four-rooms")->spec().horizon == 50);
  CHECK(make_env("grid-rooms")->spec().horizon == 30);
  CHECK(make_env("chain")->spec().horizon == 3);
  EnvParams p;
  p.horizon = 12;
  CHECK(make_env("grid-rooms", p)->spec().horizon == 12);
  CHECK_THROWS(make_env("lunar-lander"));
}
