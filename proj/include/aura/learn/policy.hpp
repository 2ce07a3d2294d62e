#pragma once

#include <vector>

#include "aura/core/types.hpp"

namespace aura {

enum class PolicyFlavor : int { Tabular = 0, Categorical = 1, DiagonalGaussian = 2 };

// Architecture descriptor; the parameter vector length is a pure function of
// these fields.
struct PolicyArchitecture {
  PolicyFlavor flavor = PolicyFlavor::Categorical;
  int state_dim = 0;   // raw environment state features
  int goal_dim = 0;    // > 0 for goal-conditioned policies
  int n_actions = 0;   // tabular / categorical
  int action_dim = 0;  // gaussian
  int n_states = 0;    // tabular
  std::vector<int> hidden{100, 100};
  double temperature = 0.1;  // tabular softmax export
  // Tabular policies decode grid feature vectors into table rows on their
  // own, so they stay usable after deserialization without the domain.
  int grid_width = 0, grid_height = 0;

  int input_dim() const { return state_dim + goal_dim; }
  int output_dim() const {
    return flavor == PolicyFlavor::DiagonalGaussian ? action_dim : n_actions;
  }
};

// One value-semantic policy covering the three flavors. Parameters live in a
// flat vector:
//   Tabular: Q row-major (n_states x n_actions)
//   MLP:     W1, b1, W2, b2, W3, b3 (weights row-major), plus log-sigma per
//            action dim for the gaussian flavor.
class StochasticPolicy final : public PolicyInterface {
 public:
  PolicyArchitecture arch;
  Eigen::VectorXd params;
  Eigen::VectorXd bound_goal;  // size 0 = unbound
  std::uint64_t domain_id = 0;

  // Transient execution/scoring views, never serialized. logit_scale
  // multiplies logits (tabular and categorical); sigma_scale multiplies the
  // gaussian standard deviation.
  double logit_scale = 1.0;
  double sigma_scale = 1.0;

  static int param_count(const PolicyArchitecture& arch);

  static StochasticPolicy make_tabular(int n_states, int n_actions,
                                       double temperature, int grid_width,
                                       int grid_height);
  static StochasticPolicy make_categorical(int state_dim, int goal_dim,
                                           int n_actions, Rng& init_rng);
  static StochasticPolicy make_gaussian(int state_dim, int goal_dim,
                                        int action_dim, Rng& init_rng);

  // PolicyInterface
  int state_dim() const override { return arch.state_dim; }
  bool discrete_actions() const override {
    return arch.flavor != PolicyFlavor::DiagonalGaussian;
  }
  int action_dim() const override {
    return discrete_actions() ? arch.n_actions : arch.action_dim;
  }
  Eigen::VectorXd sample_action(const Eigen::VectorXd& state,
                                const Eigen::VectorXd* goal,
                                Rng& rng) const override;
  Eigen::VectorXd greedy_action(const Eigen::VectorXd& state,
                                const Eigen::VectorXd* goal) const override;

  // [state] or [state; goal]; a bound goal overrides the passed one.
  Eigen::VectorXd input_for(const Eigen::VectorXd& state,
                            const Eigen::VectorXd* goal) const;

  // Discrete flavors: full action distribution at a state.
  Eigen::VectorXd action_probabilities(const Eigen::VectorXd& state,
                                       const Eigen::VectorXd* goal = nullptr) const;
  void gaussian_params(const Eigen::VectorXd& state, const Eigen::VectorXd* goal,
                       Eigen::VectorXd& mean, Eigen::VectorXd& std) const;

  double log_prob(const Eigen::VectorXd& state, const Eigen::VectorXd* goal,
                  const Eigen::VectorXd& action) const;
  Eigen::VectorXd grad_log_prob(const Eigen::VectorXd& state,
                                const Eigen::VectorXd* goal,
                                const Eigen::VectorXd& action) const;

  // Batched forms over pre-built input rows (goal features already
  // appended). Actions: one column holding indices for discrete flavors,
  // action_dim columns for gaussian.
  Eigen::MatrixXd prob_rows(const Eigen::MatrixXd& inputs) const;
  void gaussian_rows(const Eigen::MatrixXd& inputs, Eigen::MatrixXd& means,
                     Eigen::VectorXd& stds) const;
  Eigen::VectorXd log_prob_rows(const Eigen::MatrixXd& inputs,
                                const Eigen::MatrixXd& actions) const;
  // Gradient of sum_n weights[n] * log pi(a_n | x_n) in one backward pass.
  Eigen::VectorXd weighted_log_prob_grad(const Eigen::MatrixXd& inputs,
                                         const Eigen::MatrixXd& actions,
                                         const Eigen::VectorXd& weights) const;

  // Derived views.
  StochasticPolicy with_goal(const Eigen::VectorXd& goal) const;
  StochasticPolicy with_params(Eigen::VectorXd new_params) const;
  StochasticPolicy with_scales(double logit_scale_, double sigma_scale_) const;

  // Tabular access.
  int tabular_index(const Eigen::VectorXd& state) const;
  double q_value(int state, int action) const;
  double& q_value(int state, int action);
};

// Mean KL(old || new) across input rows; both policies must share an
// architecture.
double mean_kl(const StochasticPolicy& old_policy,
               const StochasticPolicy& new_policy,
               const Eigen::MatrixXd& inputs);

}  // namespace aura
