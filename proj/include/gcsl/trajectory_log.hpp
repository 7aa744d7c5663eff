#pragma once

#include <span>
#include <string>
#include <vector>

#include "gcsl/buffer.hpp"

namespace gcsl {

// Plain-text trajectory log, one trajectory per line:
//   seed T dim goal(dim) states((T+1)*dim) actions(T)
// '#' lines are comments. Values are written with 17 significant digits so
// doubles round-trip exactly.
void save_trajectories(const std::string& path, std::span<const Trajectory> trajs);
std::vector<Trajectory> load_trajectories(const std::string& path);

}  // namespace gcsl
