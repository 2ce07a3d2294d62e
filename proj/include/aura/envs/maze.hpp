#pragma once

#include <utility>
#include <vector>

#include "aura/core/types.hpp"

namespace aura {

// Point-mass maze. Cells are unit squares; cell (i, j) covers
// [i, i+1) x [j, j+1). wall_layout is row-major, true = wall. Walls always
// include the outer boundary, so positions live in [1, size-1)^2.
struct MazeSpec {
  int size = 11;
  std::vector<char> wall_layout;  // size*size, index j*size + i
  double start_x = 0.0, start_y = 0.0;
  std::vector<std::pair<int, int>> goal_cells;  // cell coords; goals at centers
  double success_radius = 0.5;
  double dt = 0.1;
  double damping = 0.1;
  double max_force = 1.0;
  int max_steps = 300;

  bool wall(int i, int j) const {
    if (i < 0 || i >= size || j < 0 || j >= size) return true;
    return wall_layout[static_cast<std::size_t>(j) * size + i] != 0;
  }
  bool wall_at(double x, double y) const {
    return wall(static_cast<int>(std::floor(x)), static_cast<int>(std::floor(y)));
  }
};

// Boundary-only layout with every interior cell free.
std::vector<char> open_layout(int size);
// Classic four-rooms: boundary plus a middle wall row and column, each with
// two door gaps.
std::vector<char> four_rooms_layout(int size);

// Physics only: force clamp, semi-implicit Euler, wall collision response
// (zero normal velocity, clamp position to the free region). State is
// (pos_x, pos_y, vel_x, vel_y).
struct MazeIntegration {
  Eigen::VectorXd next_state;
  bool force_clamped = false;
};
MazeIntegration maze_integrate(const MazeSpec& spec, const Eigen::VectorXd& state,
                               const Eigen::VectorXd& action);

double maze_reward(const MazeSpec& spec, const Eigen::VectorXd& pos,
                   const Eigen::VectorXd& goal);

class MazeDomain final : public DomainTheory {
 public:
  explicit MazeDomain(MazeSpec spec);

  int state_dim() const override { return 4; }
  const ActionSpace& action_space() const override { return actions_; }
  const GoalSpace& goal_space() const override { return goals_; }
  int max_steps() const override { return spec_.max_steps; }
  Eigen::VectorXd initial_state() const override;
  StepResult step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                  const Eigen::VectorXd& goal, int step_number) const override;
  Eigen::VectorXd achieved_goal(const Eigen::VectorXd& state) const override;
  std::uint64_t domain_id() const override { return id_; }
  std::string spec_text() const override { return spec_json_; }

  const MazeSpec& spec() const { return spec_; }

 private:
  MazeSpec spec_;
  ActionSpace actions_;
  GoalSpace goals_;
  std::string spec_json_;
  std::uint64_t id_ = 0;
};

// Free-cell connectivity between the cells containing two points.
bool maze_path_exists(const MazeSpec& spec, int sx, int sy, int gx, int gy);

}  // namespace aura
