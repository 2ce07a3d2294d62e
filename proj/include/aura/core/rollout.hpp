#pragma once

#include "aura/core/types.hpp"

namespace aura {

struct RolloutOptions {
  // Per-step probability of replacing the policy's action with a uniform
  // draw from the action space.
  double noise_level = 0.0;
  // Use the policy's mode (argmax / mean) instead of sampling.
  bool greedy = false;
};

// Simulates one episode of `policy` on `domain` pursuing `goal`. All
// stochasticity (action sampling, noise) comes from an Rng seeded with
// `seed`, so equal inputs give bit-identical trajectories.
Trajectory rollout(const DomainTheory& domain, const PolicyInterface& policy,
                   const Eigen::VectorXd& goal, std::uint64_t seed,
                   const RolloutOptions& opts = {});

// Fraction of `episodes` greedy rollouts that end in success. Episode i uses
// seed derive_seed(seed, {i}).
double success_rate(const DomainTheory& domain, const PolicyInterface& policy,
                    const Eigen::VectorXd& goal, std::uint64_t seed,
                    int episodes);

}  // namespace aura
