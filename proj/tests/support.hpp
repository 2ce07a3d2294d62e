#pragma once

// Shared builders for the test suites: small domains with known layouts and
// hand-assembled observation sequences.

#include <initializer_list>
#include <memory>
#include <utility>
#include <vector>

#include "aura/envs/families.hpp"
#include "aura/recognize/observation.hpp"

namespace support {

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) x[i++] = v;
  return x;
}

inline Eigen::VectorXd act(int a) {
  Eigen::VectorXd x(1);
  x[0] = static_cast<double>(a);
  return x;
}

inline std::shared_ptr<aura::GridDomain> grid_domain(
    int width, int height, int sx, int sy, int sdir,
    std::vector<std::pair<int, int>> goals,
    std::vector<std::pair<int, int>> lava = {}, int max_steps = 0) {
  aura::GridSpec spec;
  spec.width = width;
  spec.height = height;
  spec.start_x = sx;
  spec.start_y = sy;
  spec.start_dir = sdir;
  spec.goal_cells = std::move(goals);
  spec.lava_cells = std::move(lava);
  spec.max_steps = max_steps;
  return std::make_shared<aura::GridDomain>(spec);
}

inline aura::MazeSpec open_maze_spec(int size, double sx, double sy,
                                     std::vector<std::pair<int, int>> goals) {
  aura::MazeSpec spec;
  spec.size = size;
  spec.wall_layout = aura::open_layout(size);
  spec.start_x = sx;
  spec.start_y = sy;
  spec.goal_cells = std::move(goals);
  return spec;
}

inline std::shared_ptr<aura::MazeDomain> open_maze(
    int size, double sx, double sy, std::vector<std::pair<int, int>> goals) {
  return std::make_shared<aura::MazeDomain>(open_maze_spec(size, sx, sy, std::move(goals)));
}

inline std::shared_ptr<aura::ReachDomain> reach_domain(double success_radius = 0.1,
                                                       int max_steps = 60) {
  aura::ReachSpec spec;
  spec.success_radius = success_radius;
  spec.max_steps = max_steps;
  return std::make_shared<aura::ReachDomain>(spec);
}

inline aura::ObservationSequence make_obs(
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs) {
  aura::ObservationSequence obs;
  obs.pairs = std::move(pairs);
  obs.source_length = obs.size();
  return obs;
}

// Full-observability view of a trajectory, order preserved.
inline aura::ObservationSequence observe_all(const aura::Trajectory& traj) {
  return aura::mask(traj, 1.0, aura::MaskMode::Prefix, 0);
}

}  // namespace support
