#pragma once

#include <Eigen/Dense>

namespace aura {

// Ridge-regularized linear value predictor over degree-2 polynomial features
// of the policy input (bias, x_i, x_i*x_j for i <= j). The closed-form
// normal-equation solve cannot diverge.
class ValueBaseline {
 public:
  explicit ValueBaseline(int input_dim, double reg = 1e-2);

  void fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets);
  Eigen::VectorXd predict(const Eigen::MatrixXd& inputs) const;

  static Eigen::MatrixXd poly_features(const Eigen::MatrixXd& inputs);
  static int feature_count(int input_dim) {
    return 1 + input_dim + input_dim * (input_dim + 1) / 2;
  }

 private:
  int input_dim_;
  double reg_;
  Eigen::VectorXd weights_;
};

}  // namespace aura
