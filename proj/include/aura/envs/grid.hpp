#pragma once

#include <utility>
#include <vector>

#include "aura/core/types.hpp"

namespace aura {

// Directions are N=0, E=1, S=2, W=3 with N decreasing y. Actions are
// left=0, right=1, forward=2, stay=3.
enum GridAction : int { GridLeft = 0, GridRight = 1, GridForward = 2, GridStay = 3 };

struct GridSpec {
  int width = 9;
  int height = 9;
  std::vector<std::pair<int, int>> lava_cells;  // 0-4 cells
  int start_x = 1;
  int start_y = 1;
  int start_dir = 1;
  int max_steps = 0;  // 0 means the 4*width*height default
  std::vector<std::pair<int, int>> goal_cells;

  int effective_max_steps() const {
    return max_steps > 0 ? max_steps : 4 * width * height;
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool is_lava(int x, int y) const {
    for (auto [lx, ly] : lava_cells)
      if (lx == x && ly == y) return true;
    return false;
  }
};

struct GridState {
  int x = 0, y = 0, dir = 0;
};

// Pure kinematics: rotation or a forward move blocked by the boundary.
// Goal/lava termination is layered on top by GridDomain::step.
GridState grid_move(const GridSpec& spec, const GridState& s, int action);

// Terminal-step reward: 1 - 0.9 * (step_count / max_steps) on success, 0
// otherwise. Non-terminal steps always give 0.
double grid_reward(const GridSpec& spec, int step_count, bool succeeded);

// Feature encoding used as the learner-facing state: (x/width, y/height,
// one-hot direction), 6 dims.
Eigen::VectorXd grid_features(const GridSpec& spec, const GridState& s);
GridState grid_decode(const GridSpec& spec, const Eigen::VectorXd& features);

class GridDomain final : public DomainTheory {
 public:
  explicit GridDomain(GridSpec spec);

  int state_dim() const override { return 6; }
  const ActionSpace& action_space() const override { return actions_; }
  const GoalSpace& goal_space() const override { return goals_; }
  int max_steps() const override { return spec_.effective_max_steps(); }
  Eigen::VectorXd initial_state() const override;
  StepResult step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                  const Eigen::VectorXd& goal, int step_number) const override;
  Eigen::VectorXd achieved_goal(const Eigen::VectorXd& state) const override;
  std::uint64_t domain_id() const override { return id_; }
  std::string spec_text() const override { return spec_json_; }

  int discrete_state_count() const override {
    return spec_.width * spec_.height * 4;
  }
  int state_index(const Eigen::VectorXd& state) const override;

  const GridSpec& spec() const { return spec_; }

 private:
  GridSpec spec_;
  ActionSpace actions_;
  GoalSpace goals_;
  std::string spec_json_;
  std::uint64_t id_ = 0;
};

// True when a lava-free path exists from (sx, sy) to (gx, gy); direction is
// irrelevant because turning is always possible.
bool grid_path_exists(const GridSpec& spec, int sx, int sy, int gx, int gy);

}  // namespace aura
