#include "aura/envs/grid.hpp"
#include "aura/learn/train.hpp"

namespace aura {

namespace {
int argmax_q(const StochasticPolicy& p, int s) {
  int best = 0;
  for (int a = 1; a < p.arch.n_actions; ++a)
    if (p.q_value(s, a) > p.q_value(s, best)) best = a;
  return best;
}
}  // namespace

TrainResult q_learn(const DomainTheory& domain, const Eigen::VectorXd& goal,
                    const QLearnConfig& cfg) {
  if (!domain.action_space().is_discrete() || domain.discrete_state_count() <= 0)
    throw ConfigError("q_learn requires a discrete domain");
  const auto* grid = dynamic_cast<const GridDomain*>(&domain);
  if (grid == nullptr)
    throw ConfigError("q_learn requires the grid family (tabular state decoding)");
  if (!domain.goal_space().contains(goal))
    throw DomainError("training goal lies outside the domain's goal space");

  const int n_actions = domain.action_space().count;
  TrainResult result;
  result.policy = StochasticPolicy::make_tabular(
      domain.discrete_state_count(), n_actions, cfg.temperature,
      grid->spec().width, grid->spec().height);
  result.policy.domain_id = domain.domain_id();
  StochasticPolicy& p = result.policy;

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    double frac = cfg.episodes > 1 ? static_cast<double>(ep) / (cfg.episodes - 1) : 1.0;
    double eps = cfg.eps_start + (cfg.eps_end - cfg.eps_start) * frac;
    Rng rng(derive_seed(cfg.seed, {0x41e4, static_cast<std::uint64_t>(ep)}));

    Eigen::VectorXd state = domain.initial_state();
    double total = 0.0;
    for (int t = 1; t <= domain.max_steps(); ++t) {
      int s = domain.state_index(state);
      int a = rng.uniform() < eps ? rng.uniform_int(n_actions) : argmax_q(p, s);
      Eigen::VectorXd action(1);
      action[0] = a;
      StepResult res = domain.step(state, action, goal, t);
      total += res.reward;

      // The grid pays out 1 - 0.9 t / max_steps on success, but elapsed time
      // is invisible to the tabular state, so those targets are non-Markov
      // and let self-bootstrapping loops outrank the goal action. Value
      // targets therefore use the stationary success indicator; discounting
      // alone makes shorter paths win.
      double target;
      if (res.terminal) {
        target = res.success ? 1.0 : 0.0;
      } else {
        int s2 = domain.state_index(res.next_state);
        target = res.reward + cfg.gamma * p.q_value(s2, argmax_q(p, s2));
      }
      p.q_value(s, a) += cfg.alpha * (target - p.q_value(s, a));

      state = res.next_state;
      if (res.terminal) break;
    }
    result.curve.push_back({ep, total, 0.0});
    ++result.iterations;
  }
  return result;
}

}  // namespace aura
