#include <cmath>

#include "pg_common.hpp"

namespace aura {

namespace {

// Deterministic row subsample keeping outer-loop KL evaluations cheap on
// long-horizon tasks.
void pool_rows(Eigen::MatrixXd& pool, Eigen::Index& used, const Eigen::MatrixXd& rows,
               int cap_per_task) {
  Eigen::Index stride = std::max<Eigen::Index>(1, rows.rows() / cap_per_task);
  for (Eigen::Index r = 0; r < rows.rows(); r += stride) {
    if (used == pool.rows()) return;
    pool.row(used++) = rows.row(r);
  }
}

const char* family_name(DomainDistribution::Family f) {
  switch (f) {
    case DomainDistribution::Family::Grid: return "grid";
    case DomainDistribution::Family::Maze: return "maze";
    case DomainDistribution::Family::Reach: return "reach";
  }
  return "?";
}

}  // namespace

MetaTrainResult meta_train(const DomainDistribution& dist, const TrainConfig& cfg) {
  cfg.validate();

  Task probe = sample_task(dist, derive_seed(cfg.seed, {0x3e7a0}));
  const DomainTheory& pd = *probe.domain;
  Rng init_rng(derive_seed(cfg.seed, {0x3e7a1}));
  StochasticPolicy policy =
      pd.action_space().is_discrete()
          ? StochasticPolicy::make_categorical(pd.state_dim(), 0,
                                               pd.action_space().count, init_rng)
          : StochasticPolicy::make_gaussian(pd.state_dim(), 0,
                                            pd.action_space().dim(), init_rng);

  MetaTrainResult result;
  const int cap_per_task = 256;

  for (int i = 0; i < cfg.meta_iterations; ++i) {
    Eigen::VectorXd meta_grad = Eigen::VectorXd::Zero(policy.params.size());
    Eigen::MatrixXd pool(cap_per_task * cfg.meta_bsz, policy.arch.input_dim());
    Eigen::Index pooled = 0;
    double ret_sum = 0.0, ret_sq = 0.0;

    for (int j = 0; j < cfg.meta_bsz; ++j) {
      Task task = sample_task(
          dist, derive_seed(cfg.seed, {0x3e7a2, static_cast<std::uint64_t>(i),
                                       static_cast<std::uint64_t>(j)}));
      const DomainTheory& dom = *task.domain;
      if (dom.state_dim() != policy.arch.state_dim ||
          dom.action_space().is_discrete() != policy.discrete_actions() ||
          (policy.discrete_actions()
               ? dom.action_space().count != policy.arch.n_actions
               : dom.action_space().dim() != policy.arch.action_dim))
        throw ConfigError("sampled domain has incompatible dimensions for meta-training");

      auto fixed_goal = [&task](int, Rng&) { return task.goal; };
      StochasticPolicy adapted = policy;
      for (int k = 0; k < cfg.adapt_steps; ++k) {
        auto b = detail::collect_batch(
            dom, adapted, fixed_goal, cfg.adapt_bsz, cfg.gamma,
            derive_seed(cfg.seed, {0x3e7a3, static_cast<std::uint64_t>(i),
                                   static_cast<std::uint64_t>(j),
                                   static_cast<std::uint64_t>(k)}));
        detail::linesearch_update(adapted, b, detail::policy_gradient(adapted, b),
                                  cfg.adapt_lr, cfg);
      }

      auto post = detail::collect_batch(
          dom, adapted, fixed_goal, cfg.adapt_bsz, cfg.gamma,
          derive_seed(cfg.seed, {0x3e7a4, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(j)}));
      meta_grad += detail::policy_gradient(adapted, post) / cfg.meta_bsz;
      pool_rows(pool, pooled, post.inputs, cap_per_task);
      ret_sum += post.mean_return;
      ret_sq += post.mean_return * post.mean_return;
    }

    Eigen::MatrixXd states = pool.topRows(pooled);
    // Outer step: largest KL-admissible step along the averaged
    // post-adaptation gradient.
    double alpha = cfg.meta_lr;
    for (int k = 0; k <= cfg.ls_max_steps; ++k, alpha *= cfg.backtrack_factor) {
      StochasticPolicy cand = policy.with_params(policy.params + alpha * meta_grad);
      if (mean_kl(policy, cand, states) <= cfg.max_kl) {
        policy = std::move(cand);
        break;
      }
    }

    double mean_ret = ret_sum / cfg.meta_bsz;
    double var = cfg.meta_bsz > 1
                     ? (ret_sq - ret_sum * ret_sum / cfg.meta_bsz) / (cfg.meta_bsz - 1)
                     : 0.0;
    result.curve.push_back({i, mean_ret, std::sqrt(std::max(0.0, var))});
    ++result.meta.iterations;
    if (detail::plateaued(result.curve, cfg)) break;
  }

  result.meta.policy = std::move(policy);
  result.meta.provenance = family_name(dist.family);
  return result;
}

}  // namespace aura
