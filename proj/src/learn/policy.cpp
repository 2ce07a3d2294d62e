#include "aura/learn/policy.hpp"

#include <cmath>

namespace aura {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMat = Eigen::Map<const RowMajor>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log sqrt(2*pi)

struct MlpDims {
  int in, h1, h2, out;
  int w1, b1, w2, b2, w3, b3;  // offsets
  int mlp_total;
};

MlpDims mlp_dims(const PolicyArchitecture& arch) {
  MlpDims d;
  d.in = arch.input_dim();
  d.h1 = arch.hidden.at(0);
  d.h2 = arch.hidden.at(1);
  d.out = arch.output_dim();
  d.w1 = 0;
  d.b1 = d.w1 + d.h1 * d.in;
  d.w2 = d.b1 + d.h1;
  d.b2 = d.w2 + d.h2 * d.h1;
  d.w3 = d.b2 + d.h2;
  d.b3 = d.w3 + d.out * d.h2;
  d.mlp_total = d.b3 + d.out;
  return d;
}

struct Forward {
  Eigen::MatrixXd z1, a1, z2, a2, out;
};

Forward mlp_forward(const PolicyArchitecture& arch, const Eigen::VectorXd& params,
                    const Eigen::MatrixXd& x) {
  const MlpDims d = mlp_dims(arch);
  ConstMat w1(params.data() + d.w1, d.h1, d.in);
  ConstVec b1(params.data() + d.b1, d.h1);
  ConstMat w2(params.data() + d.w2, d.h2, d.h1);
  ConstVec b2(params.data() + d.b2, d.h2);
  ConstMat w3(params.data() + d.w3, d.out, d.h2);
  ConstVec b3(params.data() + d.b3, d.out);

  Forward f;
  f.z1 = (x * w1.transpose()).rowwise() + b1.transpose();
  f.a1 = f.z1.cwiseMax(0.0);
  f.z2 = (f.a1 * w2.transpose()).rowwise() + b2.transpose();
  f.a2 = f.z2.cwiseMax(0.0);
  f.out = (f.a2 * w3.transpose()).rowwise() + b3.transpose();
  return f;
}

// Backpropagates per-row output gradients into a flat parameter gradient.
Eigen::VectorXd mlp_backward(const PolicyArchitecture& arch,
                             const Eigen::VectorXd& params,
                             const Eigen::MatrixXd& x, const Forward& f,
                             const Eigen::MatrixXd& dout,
                             int total_params) {
  const MlpDims d = mlp_dims(arch);
  ConstMat w2(params.data() + d.w2, d.h2, d.h1);
  ConstMat w3(params.data() + d.w3, d.out, d.h2);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(total_params);
  Eigen::Map<RowMajor> gw1(grad.data() + d.w1, d.h1, d.in);
  Eigen::Map<Eigen::VectorXd> gb1(grad.data() + d.b1, d.h1);
  Eigen::Map<RowMajor> gw2(grad.data() + d.w2, d.h2, d.h1);
  Eigen::Map<Eigen::VectorXd> gb2(grad.data() + d.b2, d.h2);
  Eigen::Map<RowMajor> gw3(grad.data() + d.w3, d.out, d.h2);
  Eigen::Map<Eigen::VectorXd> gb3(grad.data() + d.b3, d.out);

  gw3 = dout.transpose() * f.a2;
  gb3 = dout.colwise().sum();
  Eigen::MatrixXd dz2 =
      (dout * w3).cwiseProduct((f.z2.array() > 0.0).cast<double>().matrix());
  gw2 = dz2.transpose() * f.a1;
  gb2 = dz2.colwise().sum();
  Eigen::MatrixXd dz1 =
      (dz2 * w2).cwiseProduct((f.z1.array() > 0.0).cast<double>().matrix());
  gw1 = dz1.transpose() * x;
  gb1 = dz1.colwise().sum();
  return grad;
}

Eigen::MatrixXd softmax_rows(Eigen::MatrixXd logits) {
  Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  logits.colwise() -= row_max;
  Eigen::MatrixXd e = logits.array().exp();
  Eigen::VectorXd sums = e.rowwise().sum();
  return e.array().colwise() / sums.array();
}

int argmax_first(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

int StochasticPolicy::param_count(const PolicyArchitecture& arch) {
  if (arch.flavor == PolicyFlavor::Tabular) return arch.n_states * arch.n_actions;
  const MlpDims d = mlp_dims(arch);
  return arch.flavor == PolicyFlavor::DiagonalGaussian ? d.mlp_total + arch.action_dim
                                                       : d.mlp_total;
}

StochasticPolicy StochasticPolicy::make_tabular(int n_states, int n_actions,
                                                double temperature,
                                                int grid_width, int grid_height) {
  StochasticPolicy p;
  p.arch.flavor = PolicyFlavor::Tabular;
  p.arch.n_states = n_states;
  p.arch.n_actions = n_actions;
  p.arch.temperature = temperature;
  p.arch.grid_width = grid_width;
  p.arch.grid_height = grid_height;
  p.arch.state_dim = 6;
  p.arch.hidden.clear();
  p.params = Eigen::VectorXd::Zero(param_count(p.arch));
  return p;
}

namespace {
void init_mlp(StochasticPolicy& p, Rng& rng) {
  const MlpDims d = mlp_dims(p.arch);
  p.params = Eigen::VectorXd::Zero(StochasticPolicy::param_count(p.arch));
  auto fill = [&](int offset, int rows, int cols) {
    double scale = std::sqrt(2.0 / (rows + cols));
    for (int i = 0; i < rows * cols; ++i) p.params[offset + i] = scale * rng.normal();
  };
  fill(d.w1, d.h1, d.in);
  fill(d.w2, d.h2, d.h1);
  fill(d.w3, d.out, d.h2);
  // biases and gaussian log-sigma stay zero (sigma starts at 1)
}
}  // namespace

StochasticPolicy StochasticPolicy::make_categorical(int state_dim, int goal_dim,
                                                    int n_actions, Rng& init_rng) {
  StochasticPolicy p;
  p.arch.flavor = PolicyFlavor::Categorical;
  p.arch.state_dim = state_dim;
  p.arch.goal_dim = goal_dim;
  p.arch.n_actions = n_actions;
  init_mlp(p, init_rng);
  return p;
}

StochasticPolicy StochasticPolicy::make_gaussian(int state_dim, int goal_dim,
                                                 int action_dim, Rng& init_rng) {
  StochasticPolicy p;
  p.arch.flavor = PolicyFlavor::DiagonalGaussian;
  p.arch.state_dim = state_dim;
  p.arch.goal_dim = goal_dim;
  p.arch.action_dim = action_dim;
  init_mlp(p, init_rng);
  return p;
}

Eigen::VectorXd StochasticPolicy::input_for(const Eigen::VectorXd& state,
                                            const Eigen::VectorXd* goal) const {
  if (arch.goal_dim == 0) return state;
  const Eigen::VectorXd* g = bound_goal.size() > 0 ? &bound_goal : goal;
  if (g == nullptr || g->size() != arch.goal_dim)
    throw ConfigError("goal-conditioned policy queried without a goal");
  Eigen::VectorXd x(arch.input_dim());
  x << state, *g;
  return x;
}

Eigen::VectorXd StochasticPolicy::action_probabilities(
    const Eigen::VectorXd& state, const Eigen::VectorXd* goal) const {
  if (!discrete_actions())
    throw ConfigError("action_probabilities requires a discrete policy");
  Eigen::MatrixXd x(1, arch.input_dim());
  x.row(0) = input_for(state, goal).transpose();
  return prob_rows(x).row(0).transpose();
}

Eigen::MatrixXd StochasticPolicy::prob_rows(const Eigen::MatrixXd& inputs) const {
  if (arch.flavor == PolicyFlavor::Tabular) {
    Eigen::MatrixXd logits(inputs.rows(), arch.n_actions);
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
      int s = tabular_index(inputs.row(n).transpose());
      for (int a = 0; a < arch.n_actions; ++a)
        logits(n, a) = q_value(s, a) / arch.temperature * logit_scale;
    }
    return softmax_rows(std::move(logits));
  }
  if (arch.flavor != PolicyFlavor::Categorical)
    throw ConfigError("prob_rows requires a discrete policy");
  Forward f = mlp_forward(arch, params, inputs);
  return softmax_rows(f.out * logit_scale);
}

void StochasticPolicy::gaussian_rows(const Eigen::MatrixXd& inputs,
                                     Eigen::MatrixXd& means,
                                     Eigen::VectorXd& stds) const {
  if (arch.flavor != PolicyFlavor::DiagonalGaussian)
    throw ConfigError("gaussian_rows requires a gaussian policy");
  Forward f = mlp_forward(arch, params, inputs);
  means = f.out;
  const MlpDims d = mlp_dims(arch);
  stds = params.segment(d.mlp_total, arch.action_dim).array().exp() * sigma_scale;
}

void StochasticPolicy::gaussian_params(const Eigen::VectorXd& state,
                                       const Eigen::VectorXd* goal,
                                       Eigen::VectorXd& mean,
                                       Eigen::VectorXd& std) const {
  Eigen::MatrixXd x(1, arch.input_dim());
  x.row(0) = input_for(state, goal).transpose();
  Eigen::MatrixXd means;
  gaussian_rows(x, means, std);
  mean = means.row(0).transpose();
}

Eigen::VectorXd StochasticPolicy::sample_action(const Eigen::VectorXd& state,
                                                const Eigen::VectorXd* goal,
                                                Rng& rng) const {
  if (discrete_actions()) {
    Eigen::VectorXd p = action_probabilities(state, goal);
    double u = rng.uniform();
    double acc = 0.0;
    int chosen = arch.n_actions - 1;
    for (int a = 0; a < arch.n_actions; ++a) {
      acc += p[a];
      if (u < acc) {
        chosen = a;
        break;
      }
    }
    Eigen::VectorXd out(1);
    out[0] = chosen;
    return out;
  }
  Eigen::VectorXd mean, std;
  gaussian_params(state, goal, mean, std);
  return mean + std.cwiseProduct(rng.normal_vec(arch.action_dim));
}

Eigen::VectorXd StochasticPolicy::greedy_action(const Eigen::VectorXd& state,
                                                const Eigen::VectorXd* goal) const {
  if (discrete_actions()) {
    Eigen::VectorXd p = action_probabilities(state, goal);
    Eigen::VectorXd out(1);
    out[0] = argmax_first(p);
    return out;
  }
  Eigen::VectorXd mean, std;
  gaussian_params(state, goal, mean, std);
  return mean;
}

Eigen::VectorXd StochasticPolicy::log_prob_rows(const Eigen::MatrixXd& inputs,
                                                const Eigen::MatrixXd& actions) const {
  Eigen::VectorXd lp(inputs.rows());
  if (discrete_actions()) {
    Eigen::MatrixXd probs = prob_rows(inputs);
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
      int a = static_cast<int>(std::lround(actions(n, 0)));
      lp[n] = std::log(probs(n, a));
    }
    return lp;
  }
  Eigen::MatrixXd means;
  Eigen::VectorXd stds;
  gaussian_rows(inputs, means, stds);
  for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
    double acc = 0.0;
    for (int i = 0; i < arch.action_dim; ++i) {
      double z = (actions(n, i) - means(n, i)) / stds[i];
      acc += -0.5 * z * z - std::log(stds[i]) - kLogSqrt2Pi;
    }
    lp[n] = acc;
  }
  return lp;
}

double StochasticPolicy::log_prob(const Eigen::VectorXd& state,
                                  const Eigen::VectorXd* goal,
                                  const Eigen::VectorXd& action) const {
  Eigen::MatrixXd x(1, arch.input_dim());
  x.row(0) = input_for(state, goal).transpose();
  Eigen::MatrixXd a(1, action.size());
  a.row(0) = action.transpose();
  return log_prob_rows(x, a)[0];
}

Eigen::VectorXd StochasticPolicy::weighted_log_prob_grad(
    const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& actions,
    const Eigen::VectorXd& weights) const {
  if (arch.flavor == PolicyFlavor::Tabular)
    throw ConfigError("tabular policies are trained by Q-learning, not gradients");

  const int total = param_count(arch);
  Forward f = mlp_forward(arch, params, inputs);

  Eigen::MatrixXd dout(inputs.rows(), arch.output_dim());
  Eigen::VectorXd extra;  // gaussian log-sigma gradient
  if (arch.flavor == PolicyFlavor::Categorical) {
    Eigen::MatrixXd probs = softmax_rows(f.out * logit_scale);
    dout = -probs;
    for (Eigen::Index n = 0; n < inputs.rows(); ++n)
      dout(n, static_cast<int>(std::lround(actions(n, 0)))) += 1.0;
    dout = (dout.array().colwise() * weights.array()).matrix() * logit_scale;
  } else {
    const MlpDims d = mlp_dims(arch);
    Eigen::VectorXd stds =
        params.segment(d.mlp_total, arch.action_dim).array().exp() * sigma_scale;
    extra = Eigen::VectorXd::Zero(arch.action_dim);
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
      for (int i = 0; i < arch.action_dim; ++i) {
        double diff = actions(n, i) - f.out(n, i);
        double inv_var = 1.0 / (stds[i] * stds[i]);
        dout(n, i) = weights[n] * diff * inv_var;
        extra[i] += weights[n] * (diff * diff * inv_var - 1.0);
      }
    }
  }

  Eigen::VectorXd grad = mlp_backward(arch, params, inputs, f, dout, total);
  if (arch.flavor == PolicyFlavor::DiagonalGaussian)
    grad.segment(mlp_dims(arch).mlp_total, arch.action_dim) = extra;
  return grad;
}

Eigen::VectorXd StochasticPolicy::grad_log_prob(const Eigen::VectorXd& state,
                                                const Eigen::VectorXd* goal,
                                                const Eigen::VectorXd& action) const {
  Eigen::MatrixXd x(1, arch.input_dim());
  x.row(0) = input_for(state, goal).transpose();
  Eigen::MatrixXd a(1, action.size());
  a.row(0) = action.transpose();
  Eigen::VectorXd w(1);
  w[0] = 1.0;
  return weighted_log_prob_grad(x, a, w);
}

StochasticPolicy StochasticPolicy::with_goal(const Eigen::VectorXd& goal) const {
  if (arch.goal_dim == 0)
    throw ConfigError("cannot bind a goal into an unconditioned policy");
  if (goal.size() != arch.goal_dim)
    throw ConfigError("bound goal has wrong dimension");
  StochasticPolicy p = *this;
  p.bound_goal = goal;
  return p;
}

StochasticPolicy StochasticPolicy::with_params(Eigen::VectorXd new_params) const {
  if (new_params.size() != params.size())
    throw ConfigError("parameter vector length mismatch");
  StochasticPolicy p = *this;
  p.params = std::move(new_params);
  return p;
}

StochasticPolicy StochasticPolicy::with_scales(double logit_scale_,
                                               double sigma_scale_) const {
  StochasticPolicy p = *this;
  p.logit_scale = logit_scale_;
  p.sigma_scale = sigma_scale_;
  return p;
}

int StochasticPolicy::tabular_index(const Eigen::VectorXd& state) const {
  int x = static_cast<int>(std::lround(state[0] * arch.grid_width));
  int y = static_cast<int>(std::lround(state[1] * arch.grid_height));
  int dir = 0;
  for (int i = 1; i < 4; ++i)
    if (state[2 + i] > state[2 + dir]) dir = i;
  int idx = (y * arch.grid_width + x) * 4 + dir;
  if (idx < 0 || idx >= arch.n_states)
    throw DomainError("tabular state index out of range");
  return idx;
}

double StochasticPolicy::q_value(int state, int action) const {
  return params[state * arch.n_actions + action];
}

double& StochasticPolicy::q_value(int state, int action) {
  return params[state * arch.n_actions + action];
}

double mean_kl(const StochasticPolicy& old_policy,
               const StochasticPolicy& new_policy,
               const Eigen::MatrixXd& inputs) {
  if (inputs.rows() == 0) return 0.0;
  if (old_policy.discrete_actions()) {
    Eigen::MatrixXd p = old_policy.prob_rows(inputs);
    Eigen::MatrixXd q = new_policy.prob_rows(inputs);
    double acc = 0.0;
    for (Eigen::Index n = 0; n < p.rows(); ++n)
      for (Eigen::Index a = 0; a < p.cols(); ++a)
        if (p(n, a) > 0.0) acc += p(n, a) * std::log(p(n, a) / q(n, a));
    return acc / static_cast<double>(p.rows());
  }
  Eigen::MatrixXd mu1, mu2;
  Eigen::VectorXd s1, s2;
  old_policy.gaussian_rows(inputs, mu1, s1);
  new_policy.gaussian_rows(inputs, mu2, s2);
  double acc = 0.0;
  for (Eigen::Index n = 0; n < mu1.rows(); ++n)
    for (Eigen::Index i = 0; i < mu1.cols(); ++i) {
      double var1 = s1[i] * s1[i], var2 = s2[i] * s2[i];
      double diff = mu1(n, i) - mu2(n, i);
      acc += std::log(s2[i] / s1[i]) + (var1 + diff * diff) / (2.0 * var2) - 0.5;
    }
  return acc / static_cast<double>(mu1.rows());
}

}  // namespace aura
