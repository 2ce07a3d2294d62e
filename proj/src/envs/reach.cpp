#include "aura/envs/reach.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace aura {

ReachStep reach_step(const ReachSpec& spec, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& action, const Eigen::VectorXd& goal) {
  if (state.size() != 3 || action.size() != 3 || goal.size() != 3)
    throw DomainError("reach expects 3-dimensional state, action, and goal");

  ReachStep out;
  Eigen::Vector3d vel = action;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(vel[i]) > spec.max_velocity) {
      vel[i] = std::clamp(vel[i], -spec.max_velocity, spec.max_velocity);
      out.clamped = true;
    }
  }
  Eigen::Vector3d pos = state.head(3) + spec.dt * vel;
  for (int i = 0; i < 3; ++i)
    pos[i] = std::clamp(pos[i], spec.workspace_low[i], spec.workspace_high[i]);

  double dist = (pos - goal.head(3)).norm();
  out.next_state = pos;
  out.reward = -dist;
  out.terminal = dist < spec.success_radius;
  return out;
}

ReachDomain::ReachDomain(ReachSpec spec) : spec_(std::move(spec)) {
  for (int i = 0; i < 3; ++i) {
    if (spec_.workspace_low[i] >= spec_.workspace_high[i])
      throw ConfigError("reach workspace box is degenerate");
    if (spec_.start_effector[i] < spec_.workspace_low[i] ||
        spec_.start_effector[i] > spec_.workspace_high[i])
      throw ConfigError("reach start outside workspace");
    if (spec_.goal_low[i] < spec_.workspace_low[i] ||
        spec_.goal_high[i] > spec_.workspace_high[i])
      throw ConfigError("reach goal box outside workspace");
  }

  Eigen::VectorXd lo(3), hi(3);
  lo.setConstant(-spec_.max_velocity);
  hi.setConstant(spec_.max_velocity);
  actions_ = ActionSpace::box(lo, hi);
  goals_ = GoalSpace::box(spec_.goal_low, spec_.goal_high, spec_.success_radius);

  nlohmann::json j;
  j["family"] = "reach";
  j["workspace_low"] = {spec_.workspace_low[0], spec_.workspace_low[1], spec_.workspace_low[2]};
  j["workspace_high"] = {spec_.workspace_high[0], spec_.workspace_high[1], spec_.workspace_high[2]};
  j["start"] = {spec_.start_effector[0], spec_.start_effector[1], spec_.start_effector[2]};
  j["goal_low"] = {spec_.goal_low[0], spec_.goal_low[1], spec_.goal_low[2]};
  j["goal_high"] = {spec_.goal_high[0], spec_.goal_high[1], spec_.goal_high[2]};
  j["success_radius"] = spec_.success_radius;
  j["max_velocity"] = spec_.max_velocity;
  j["dt"] = spec_.dt;
  j["max_steps"] = spec_.max_steps;
  spec_json_ = j.dump();
  id_ = fnv1a_str(spec_json_);
}

StepResult ReachDomain::step(const Eigen::VectorXd& state,
                             const Eigen::VectorXd& action,
                             const Eigen::VectorXd& goal, int) const {
  auto r = reach_step(spec_, state, action, goal);
  StepResult res;
  res.next_state = r.next_state;
  res.reward = r.reward;
  res.terminal = r.terminal;
  res.success = r.terminal;
  res.clamped = r.clamped;
  return res;
}

}  // namespace aura
