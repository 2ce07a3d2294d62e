#include <cmath>
#include <numeric>

#include "pg_common.hpp"

namespace aura {

namespace detail {

Batch collect_batch(const DomainTheory& domain, const StochasticPolicy& policy,
                    const GoalProvider& goal_of, int episodes, double gamma,
                    std::uint64_t base_seed) {
  std::vector<Trajectory> trajs;
  std::vector<Eigen::VectorXd> goals;
  trajs.reserve(episodes);
  int total_steps = 0;
  for (int k = 0; k < episodes; ++k) {
    Rng goal_rng(derive_seed(base_seed, {0xa110c, static_cast<std::uint64_t>(k)}));
    Eigen::VectorXd goal = goal_of(k, goal_rng);
    std::uint64_t seed = derive_seed(
        base_seed, {domain.domain_id(), hash_vector(goal), static_cast<std::uint64_t>(k)});
    trajs.push_back(rollout(domain, policy, goal, seed));
    goals.push_back(std::move(goal));
    total_steps += trajs.back().length();
  }

  Batch b;
  b.episodes = episodes;
  const int in_dim = policy.arch.input_dim();
  const int a_cols = policy.discrete_actions() ? 1 : policy.arch.action_dim;
  b.inputs.resize(total_steps, in_dim);
  b.actions.resize(total_steps, a_cols);
  Eigen::VectorXd returns(total_steps);

  int row = 0;
  double sum_ret = 0.0, sum_sq = 0.0;
  for (int k = 0; k < episodes; ++k) {
    const Trajectory& traj = trajs[k];
    double total = traj.total_reward();
    sum_ret += total;
    sum_sq += total * total;
    // Discounted reward-to-go per step, computed backwards.
    double acc = 0.0;
    std::vector<double> rtg(traj.steps.size());
    for (int t = traj.length() - 1; t >= 0; --t) {
      acc = traj.steps[t].reward + gamma * acc;
      rtg[t] = acc;
    }
    for (int t = 0; t < traj.length(); ++t) {
      b.inputs.row(row) = policy.input_for(traj.steps[t].state, &goals[k]).transpose();
      b.actions.row(row) = traj.steps[t].action.transpose();
      returns[row] = rtg[t];
      ++row;
    }
  }

  b.mean_return = sum_ret / episodes;
  double var = episodes > 1
                   ? (sum_sq - sum_ret * sum_ret / episodes) / (episodes - 1)
                   : 0.0;
  b.std_return = std::sqrt(std::max(0.0, var));

  ValueBaseline baseline(in_dim);
  baseline.fit(b.inputs, returns);
  b.advantages = returns - baseline.predict(b.inputs);
  return b;
}

Eigen::VectorXd policy_gradient(const StochasticPolicy& policy, const Batch& batch) {
  Eigen::VectorXd weights = batch.advantages / static_cast<double>(batch.advantages.size());
  Eigen::VectorXd grad = policy.weighted_log_prob_grad(batch.inputs, batch.actions, weights);
  if (!grad.allFinite())
    throw TrainingError("policy gradient contains non-finite entries");
  return grad;
}

bool linesearch_update(StochasticPolicy& policy, const Batch& batch,
                       const Eigen::VectorXd& direction, double lr,
                       const TrainConfig& cfg) {
  if (direction.lpNorm<Eigen::Infinity>() == 0.0) return true;  // nothing to do

  const Eigen::VectorXd lp_old = policy.log_prob_rows(batch.inputs, batch.actions);
  const double surrogate_old = batch.advantages.mean();

  double alpha = lr;
  for (int k = 0; k <= cfg.ls_max_steps; ++k, alpha *= cfg.backtrack_factor) {
    StochasticPolicy cand = policy.with_params(policy.params + alpha * direction);
    double kl = mean_kl(policy, cand, batch.inputs);
    if (!(kl <= cfg.max_kl)) continue;
    Eigen::VectorXd lp_new = cand.log_prob_rows(batch.inputs, batch.actions);
    double surrogate =
        ((lp_new - lp_old).array().exp() * batch.advantages.array()).mean();
    if (surrogate + 1e-12 < surrogate_old) continue;
    policy = std::move(cand);
    return true;
  }
  return false;
}

bool plateaued(const std::vector<IterationStat>& curve, const TrainConfig& cfg) {
  if (!cfg.plateau_stop) return false;
  const int w = cfg.plateau_window;
  if (static_cast<int>(curve.size()) < std::max(2 * w, cfg.plateau_min_iterations))
    return false;
  auto mean_of = [&](int begin) {
    double s = 0.0;
    for (int i = begin; i < begin + w; ++i) s += curve[i].mean_return;
    return s / w;
  };
  const int n = static_cast<int>(curve.size());
  double prev = mean_of(n - 2 * w);
  double recent = mean_of(n - w);
  if (std::abs(prev) < 1e-12) return false;  // no signal yet
  return (recent - prev) < cfg.plateau_tol * std::abs(prev);
}

}  // namespace detail

void TrainConfig::validate() const {
  if (lr <= 0 || adapt_lr <= 0 || meta_lr <= 0) throw ConfigError("learning rates must be positive");
  if (batch_size <= 0 || adapt_bsz <= 0 || meta_bsz <= 0) throw ConfigError("batch sizes must be positive");
  if (gamma <= 0 || gamma > 1) throw ConfigError("gamma must be in (0, 1]");
  if (max_kl <= 0 || max_kl >= 1) throw ConfigError("max_kl must be in (0, 1)");
  if (backtrack_factor <= 0 || backtrack_factor >= 1) throw ConfigError("backtrack_factor must be in (0, 1)");
  if (ls_max_steps <= 0 || iterations <= 0 || meta_iterations <= 0 || adapt_steps < 0)
    throw ConfigError("iteration counts must be positive");
}

namespace {

StochasticPolicy initial_policy(const DomainTheory& domain, int goal_dim,
                                const TrainConfig& cfg,
                                const Eigen::VectorXd* init_params) {
  Rng init_rng(derive_seed(cfg.seed, {0x1417}));
  StochasticPolicy policy =
      domain.action_space().is_discrete()
          ? StochasticPolicy::make_categorical(domain.state_dim(), goal_dim,
                                               domain.action_space().count, init_rng)
          : StochasticPolicy::make_gaussian(domain.state_dim(), goal_dim,
                                            domain.action_space().dim(), init_rng);
  policy.domain_id = domain.domain_id();
  if (init_params != nullptr) {
    if (init_params->size() != policy.params.size())
      throw ConfigError("initial parameter vector does not fit the architecture");
    policy.params = *init_params;
  }
  return policy;
}

TrainResult pg_loop(const DomainTheory& domain, const detail::GoalProvider& goal_of,
                    int goal_dim, const TrainConfig& cfg,
                    const Eigen::VectorXd* init_params) {
  cfg.validate();
  TrainResult result;
  result.policy = initial_policy(domain, goal_dim, cfg, init_params);

  for (int i = 0; i < cfg.iterations; ++i) {
    auto batch = detail::collect_batch(
        domain, result.policy, goal_of, cfg.batch_size, cfg.gamma,
        derive_seed(cfg.seed, {0xba7c4, static_cast<std::uint64_t>(i)}));
    result.curve.push_back({i, batch.mean_return, batch.std_return});
    Eigen::VectorXd grad = detail::policy_gradient(result.policy, batch);
    if (!detail::linesearch_update(result.policy, batch, grad, cfg.lr, cfg))
      ++result.skipped_updates;
    ++result.iterations;
    if (detail::plateaued(result.curve, cfg)) break;
  }
  return result;
}

}  // namespace

TrainResult pg_train(const DomainTheory& domain, const Eigen::VectorXd& goal,
                     const TrainConfig& cfg, const Eigen::VectorXd* init_params) {
  if (!domain.goal_space().contains(goal))
    throw DomainError("training goal lies outside the domain's goal space");
  auto fixed = [goal](int, Rng&) { return goal; };
  return pg_loop(domain, fixed, 0, cfg, init_params);
}

TrainResult gc_train(const DomainTheory& domain, const TrainConfig& cfg) {
  const GoalSpace& gs = domain.goal_space();
  auto sampler = [&gs](int, Rng& rng) { return gs.sample(rng); };
  TrainResult result = pg_loop(domain, sampler, gs.dim(), cfg, nullptr);
  return result;
}

TrainResult gc_fine_tune(const DomainTheory& domain, const Eigen::VectorXd& goal,
                         const TrainConfig& cfg, const Eigen::VectorXd& init_params) {
  const GoalSpace& gs = domain.goal_space();
  if (!gs.contains(goal))
    throw DomainError("training goal lies outside the domain's goal space");
  auto fixed = [goal](int, Rng&) { return goal; };
  return pg_loop(domain, fixed, gs.dim(), cfg, &init_params);
}

TrainResult fine_tune(const MetaPolicy& meta, const DomainTheory& domain,
                      const Eigen::VectorXd& goal, const TrainConfig& cfg) {
  if (meta.policy.arch.state_dim != domain.state_dim() ||
      meta.policy.discrete_actions() != domain.action_space().is_discrete())
    throw ConfigError("meta-policy incompatible with this domain");
  return pg_train(domain, goal, cfg, &meta.policy.params);
}

}  // namespace aura
