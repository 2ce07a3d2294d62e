#include "aura/learn/baseline.hpp"

#include "aura/core/errors.hpp"

namespace aura {

ValueBaseline::ValueBaseline(int input_dim, double reg)
    : input_dim_(input_dim), reg_(reg) {
  weights_ = Eigen::VectorXd::Zero(feature_count(input_dim));
}

Eigen::MatrixXd ValueBaseline::poly_features(const Eigen::MatrixXd& inputs) {
  const Eigen::Index n = inputs.rows();
  const int d = static_cast<int>(inputs.cols());
  Eigen::MatrixXd phi(n, feature_count(d));
  phi.col(0).setOnes();
  phi.middleCols(1, d) = inputs;
  int k = 1 + d;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      phi.col(k++) = inputs.col(i).cwiseProduct(inputs.col(j));
  return phi;
}

void ValueBaseline::fit(const Eigen::MatrixXd& inputs,
                        const Eigen::VectorXd& targets) {
  if (inputs.cols() != input_dim_)
    throw ConfigError("baseline input dimension mismatch");
  Eigen::MatrixXd phi = poly_features(inputs);
  Eigen::MatrixXd gram = phi.transpose() * phi;
  gram.diagonal().array() += reg_;
  weights_ = gram.ldlt().solve(phi.transpose() * targets);
}

Eigen::VectorXd ValueBaseline::predict(const Eigen::MatrixXd& inputs) const {
  if (inputs.cols() != input_dim_)
    throw ConfigError("baseline input dimension mismatch");
  return poly_features(inputs) * weights_;
}

}  // namespace aura
