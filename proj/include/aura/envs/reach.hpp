#pragma once

#include "aura/core/types.hpp"

namespace aura {

// Velocity-controlled point effector in a 3D box workspace with a dense
// distance reward.
struct ReachSpec {
  Eigen::Vector3d workspace_low{-1.0, -1.0, -1.0};
  Eigen::Vector3d workspace_high{1.0, 1.0, 1.0};
  Eigen::Vector3d start_effector{0.0, 0.0, 0.0};
  Eigen::Vector3d goal_low{-0.8, -0.8, -0.8};
  Eigen::Vector3d goal_high{0.8, 0.8, 0.8};
  double success_radius = 0.1;
  double max_velocity = 1.0;
  double dt = 0.1;
  int max_steps = 60;
};

struct ReachStep {
  Eigen::VectorXd next_state;
  double reward = 0.0;
  bool terminal = false;
  bool clamped = false;
};

// pos' = clamp(pos + dt * action, workspace); reward = -|pos' - goal|;
// terminal when within success_radius. Velocities beyond max_velocity are
// clamped and flagged.
ReachStep reach_step(const ReachSpec& spec, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& action, const Eigen::VectorXd& goal);

class ReachDomain final : public DomainTheory {
 public:
  explicit ReachDomain(ReachSpec spec);

  int state_dim() const override { return 3; }
  const ActionSpace& action_space() const override { return actions_; }
  const GoalSpace& goal_space() const override { return goals_; }
  int max_steps() const override { return spec_.max_steps; }
  Eigen::VectorXd initial_state() const override { return spec_.start_effector; }
  StepResult step(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                  const Eigen::VectorXd& goal, int step_number) const override;
  Eigen::VectorXd achieved_goal(const Eigen::VectorXd& state) const override {
    return state;
  }
  std::uint64_t domain_id() const override { return id_; }
  std::string spec_text() const override { return spec_json_; }

  const ReachSpec& spec() const { return spec_; }

 private:
  ReachSpec spec_;
  ActionSpace actions_;
  GoalSpace goals_;
  std::string spec_json_;
  std::uint64_t id_ = 0;
};

}  // namespace aura
