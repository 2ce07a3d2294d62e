#pragma once

#include "aura/envs/grid.hpp"
#include "aura/envs/maze.hpp"
#include "aura/envs/reach.hpp"

namespace aura {

// Parameter ranges for sampling grid domains. When goal_pool is non-empty the
// sampled domain's candidate goal set is exactly the pool; otherwise
// goals_per_domain random cells are drawn.
struct GridFamily {
  int width = 9, height = 9;
  int lava_min = 0, lava_max = 4;
  int start_x = 1, start_y = 1, start_dir = 1;
  int goals_per_domain = 4;
  int max_steps = 0;  // 0 keeps the grid default
  std::vector<std::pair<int, int>> goal_pool;
};

struct MazeFamily {
  int size_min = 6, size_max = 11;
  // Layout per sample: four-rooms when forced, else drawn from
  // {open, four-rooms, random interior walls}.
  bool four_rooms_only = false;
  int goals_per_domain = 3;
  double success_radius = 0.5;
  double dt = 0.1;
  double damping = 0.1;
  double max_force = 1.0;
  int max_steps = 300;
  // Goals are kept within this straight-line distance band from the start so
  // sampled tasks stay solvable under the episode budget.
  double goal_dist_min = 1.5;
  double goal_dist_max = 6.0;
  bool fixed_start = false;
  double start_x = 0.0, start_y = 0.0;
  std::vector<std::pair<int, int>> goal_pool;
};

struct ReachFamily {
  ReachSpec base;
};

struct DomainDistribution {
  enum class Family { Grid, Maze, Reach };
  Family family = Family::Grid;
  GridFamily grid;
  MazeFamily maze;
  ReachFamily reach;
};

// Draws a valid domain; rejection sampling is bounded at 1000 attempts and
// raises a configuration error when exhausted.
DomainPtr sample_domain(const DomainDistribution& dist, std::uint64_t seed);

struct Task {
  DomainPtr domain;
  Eigen::VectorXd goal;
};

// One meta-training task: a sampled domain plus a goal drawn from its goal
// space.
Task sample_task(const DomainDistribution& dist, std::uint64_t seed);

}  // namespace aura
