#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aura/envs/families.hpp"
#include "aura/learn/policy.hpp"

namespace aura {

struct TrainConfig {
  double lr = 0.01;
  int batch_size = 20;
  double gamma = 0.99;
  double max_kl = 0.01;
  double backtrack_factor = 0.5;
  int ls_max_steps = 15;
  int iterations = 100;
  std::uint64_t seed = 0;

  // Meta extension.
  double adapt_lr = 0.01;
  int adapt_steps = 3;
  int adapt_bsz = 5;
  int meta_bsz = 5;
  double meta_lr = 1.0;
  int meta_iterations = 60;

  // Early stop: halt when the moving average over plateau_window iterations
  // improves by less than plateau_tol relative to the previous window.
  bool plateau_stop = true;
  int plateau_window = 20;
  double plateau_tol = 0.01;
  int plateau_min_iterations = 40;

  void validate() const;
};

struct QLearnConfig {
  int episodes = 3000;
  double alpha = 0.3;
  double gamma = 0.99;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double temperature = 0.1;  // softmax export
  std::uint64_t seed = 0;
};

struct IterationStat {
  int iteration = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
};

struct TrainResult {
  StochasticPolicy policy;
  std::vector<IterationStat> curve;
  int iterations = 0;  // executed optimizer iterations (episodes for q_learn)
  int skipped_updates = 0;
};

struct MetaPolicy {
  StochasticPolicy policy;
  std::string provenance;
  int iterations = 0;
};

struct MetaTrainResult {
  MetaPolicy meta;
  std::vector<IterationStat> curve;  // mean post-adaptation return per iteration
};

// Tabular Q-learning with epsilon-greedy exploration; the exported policy is
// a softmax over Q at the configured temperature.
TrainResult q_learn(const DomainTheory& domain, const Eigen::VectorXd& goal,
                    const QLearnConfig& cfg);

// Advantage-weighted policy gradient with a KL-constrained backtracking line
// search (step sizes lr, lr/2, ... accepted when mean KL <= max_kl and the
// importance-weighted surrogate does not decrease).
TrainResult pg_train(const DomainTheory& domain, const Eigen::VectorXd& goal,
                     const TrainConfig& cfg,
                     const Eigen::VectorXd* init_params = nullptr);

// Same optimizer, but every episode draws a fresh goal from the domain's
// goal space and the policy input is state (+) goal.
TrainResult gc_train(const DomainTheory& domain, const TrainConfig& cfg);

TrainResult fine_tune(const MetaPolicy& meta, const DomainTheory& domain,
                      const Eigen::VectorXd& goal, const TrainConfig& cfg);

// Continues training a goal-conditioned policy on one fixed goal; used when
// a zero-shot binding fails its competence probe.
TrainResult gc_fine_tune(const DomainTheory& domain, const Eigen::VectorXd& goal,
                         const TrainConfig& cfg, const Eigen::VectorXd& init_params);

// First-order meta-training: inner loops adapt a clone per sampled task,
// the outer step follows the average post-adaptation gradient under the
// same KL constraint.
MetaTrainResult meta_train(const DomainDistribution& dist, const TrainConfig& cfg);

}  // namespace aura
