#pragma once

#include <functional>

#include "aura/core/rollout.hpp"
#include "aura/learn/baseline.hpp"
#include "aura/learn/train.hpp"

// Shared machinery between single-task policy-gradient training and the
// meta-training loops.
namespace aura::detail {

struct Batch {
  Eigen::MatrixXd inputs;   // one row per step, goal features appended when conditioned
  Eigen::MatrixXd actions;  // index column (discrete) or action rows (gaussian)
  Eigen::VectorXd advantages;
  double mean_return = 0.0;  // undiscounted per-episode total reward
  double std_return = 0.0;
  int episodes = 0;
};

using GoalProvider = std::function<Eigen::VectorXd(int episode_index, Rng& rng)>;

Batch collect_batch(const DomainTheory& domain, const StochasticPolicy& policy,
                    const GoalProvider& goal_of, int episodes, double gamma,
                    std::uint64_t base_seed);

Eigen::VectorXd policy_gradient(const StochasticPolicy& policy, const Batch& batch);

// Backtracking line search along `direction`; mutates the policy when a step
// satisfying the KL bound and surrogate non-decrease is found.
bool linesearch_update(StochasticPolicy& policy, const Batch& batch,
                       const Eigen::VectorXd& direction, double lr,
                       const TrainConfig& cfg);

// True when the last plateau_window of the curve improved the previous
// window's average by less than plateau_tol (relative).
bool plateaued(const std::vector<IterationStat>& curve, const TrainConfig& cfg);

}  // namespace aura::detail
