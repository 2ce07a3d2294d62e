#include "aura/core/rollout.hpp"

namespace aura {

Trajectory rollout(const DomainTheory& domain, const PolicyInterface& policy,
                   const Eigen::VectorXd& goal, std::uint64_t seed,
                   const RolloutOptions& opts) {
  if (policy.state_dim() != domain.state_dim() &&
      policy.state_dim() != domain.state_dim() + goal.size())
    throw DomainError("rollout: policy state dim " +
                      std::to_string(policy.state_dim()) +
                      " does not match domain state dim " +
                      std::to_string(domain.state_dim()));
  if (policy.discrete_actions() != domain.action_space().is_discrete())
    throw DomainError("rollout: policy/domain action space kind mismatch");

  Rng rng(seed);
  Trajectory traj;
  traj.goal = goal;
  traj.seed = seed;

  Eigen::VectorXd state = domain.initial_state();
  const int limit = domain.max_steps();
  for (int t = 1; t <= limit; ++t) {
    Eigen::VectorXd action;
    if (opts.noise_level > 0.0 && rng.uniform() < opts.noise_level)
      action = domain.action_space().sample_uniform(rng);
    else if (opts.greedy)
      action = policy.greedy_action(state, &goal);
    else
      action = policy.sample_action(state, &goal, rng);

    StepResult res = domain.step(state, action, goal, t);
    traj.steps.push_back({state, action, res.reward, res.next_state, res.terminal});
    if (res.clamped) ++traj.clamped_steps;
    state = res.next_state;
    if (res.terminal) {
      traj.success = res.success;
      break;
    }
  }
  return traj;
}

double success_rate(const DomainTheory& domain, const PolicyInterface& policy,
                    const Eigen::VectorXd& goal, std::uint64_t seed,
                    int episodes) {
  int wins = 0;
  RolloutOptions opts;
  opts.greedy = true;
  for (int i = 0; i < episodes; ++i) {
    auto traj = rollout(domain, policy, goal,
                        derive_seed(seed, {static_cast<std::uint64_t>(i)}), opts);
    if (traj.success) ++wins;
  }
  return episodes > 0 ? static_cast<double>(wins) / episodes : 0.0;
}

}  // namespace aura
