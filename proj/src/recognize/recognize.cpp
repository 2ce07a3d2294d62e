#include "aura/recognize/recognize.hpp"

#include <cmath>

namespace aura {

namespace {
bool same_state(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a - b).lpNorm<Eigen::Infinity>() < 1e-12;
}
}  // namespace

const Eigen::VectorXd& PseudoPolicy::probs_at(const Eigen::VectorXd& state) const {
  for (const auto& [s, p] : rows)
    if (same_state(s, state)) return p;
  throw DomainError("pseudo-policy queried at an unobserved state");
}

PseudoPolicy build_pseudo_policy(const ObservationSequence& obs, int n_actions,
                                 double epsilon) {
  if (n_actions <= 0) throw ConfigError("pseudo-policy needs a discrete action count");
  if (epsilon < 0.0 || epsilon >= 1.0 / n_actions)
    throw ConfigError("pseudo-policy epsilon must lie in [0, 1/n_actions)");
  for (const auto& [state, action] : obs.pairs)
    if (action.size() != 1)
      throw ConfigError("pseudo-policy requires discrete (index) actions");

  PseudoPolicy pp;
  pp.epsilon = epsilon;
  std::vector<Eigen::VectorXd> counts;  // observed-action tallies per row
  for (const auto& [state, action] : obs.pairs) {
    int a = discrete_action(action);
    if (a < 0 || a >= n_actions) throw DomainError("observed action out of range");
    bool found = false;
    for (std::size_t r = 0; r < pp.rows.size(); ++r)
      if (same_state(pp.rows[r].first, state)) {
        counts[r][a] += 1.0;
        found = true;
        break;
      }
    if (!found) {
      pp.rows.emplace_back(state, Eigen::VectorXd());
      counts.push_back(Eigen::VectorXd::Zero(n_actions));
      counts.back()[a] = 1.0;
    }
  }
  for (std::size_t r = 0; r < pp.rows.size(); ++r) {
    Eigen::VectorXd freq = counts[r] / counts[r].sum();
    pp.rows[r].second =
        (1.0 - epsilon) * freq + Eigen::VectorXd::Constant(n_actions, epsilon / n_actions);
  }
  return pp;
}

double kl_score(const StochasticPolicy& policy_g, const ObservationSequence& obs,
                double epsilon, bool full_kl) {
  if (!policy_g.discrete_actions())
    throw ConfigError("kl_score requires discrete actions; use the wasserstein metric");
  if (epsilon <= 0.0)
    throw ConfigError("kl_score needs epsilon > 0 to keep the pseudo-policy finite");

  PseudoPolicy pi_o = build_pseudo_policy(obs, policy_g.action_dim(), epsilon);
  double score = 0.0;
  for (const auto& [state, action] : obs.pairs) {
    Eigen::VectorXd pg = policy_g.action_probabilities(state);
    const Eigen::VectorXd& po = pi_o.probs_at(state);
    if (full_kl) {
      for (int a = 0; a < pg.size(); ++a)
        if (pg[a] > 0.0) score += pg[a] * std::log(pg[a] / po[a]);
    } else {
      int a = discrete_action(action);
      if (pg[a] > 0.0) score += pg[a] * std::log(pg[a] / po[a]);
    }
  }
  return score;
}

double wasserstein_score(const ObservationSequence& obs,
                         const StochasticPolicy& policy,
                         const Eigen::VectorXd& goal, int n_samples,
                         std::uint64_t rng_seed) {
  if (policy.discrete_actions())
    throw ConfigError("wasserstein_score requires continuous actions");
  if (obs.pairs.empty()) throw DomainError("empty observation sequence");

  const Eigen::VectorXd* g = goal.size() > 0 ? &goal : nullptr;
  Rng rng(rng_seed);
  double total = 0.0;
  for (const auto& [state, action] : obs.pairs) {
    if (action.size() != policy.arch.action_dim)
      throw ConfigError("observed action dimension does not match the policy");
    if (n_samples == 0) {
      Eigen::VectorXd mean, std;
      policy.gaussian_params(state, g, mean, std);
      total += (action - mean).lpNorm<1>();
    } else {
      double acc = 0.0;
      for (int k = 0; k < n_samples; ++k)
        acc += (action - policy.sample_action(state, g, rng)).lpNorm<1>();
      total += acc / n_samples;
    }
  }
  return total / static_cast<double>(obs.pairs.size());
}

RecognitionResult infer_goal(const std::vector<StochasticPolicy>& candidates,
                             const std::vector<Eigen::VectorXd>& goals,
                             const ObservationSequence& obs,
                             const RecognitionParams& params) {
  if (candidates.empty()) throw ConfigError("infer_goal needs at least one candidate");
  if (candidates.size() != goals.size())
    throw ConfigError("candidate policies and goals must align");

  RecognitionResult result;
  result.goals = goals;
  result.metric = params.metric;
  bool rescale = params.logit_scale != 1.0 || params.sigma_scale != 1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    StochasticPolicy view;
    const StochasticPolicy* pol = &candidates[i];
    if (rescale) {
      view = candidates[i].with_scales(params.logit_scale, params.sigma_scale);
      pol = &view;
    }
    double distance =
        params.metric == Metric::KL
            ? kl_score(*pol, obs, params.epsilon, params.full_kl)
            : wasserstein_score(obs, *pol, goals[i], params.n_samples,
                                derive_seed(params.seed, {i}));
    result.scores.push_back(-distance);
  }

  double best = result.scores[0];
  for (double s : result.scores) best = std::max(best, s);
  int within = 0;
  int chosen = -1;
  for (std::size_t i = 0; i < result.scores.size(); ++i)
    if (result.scores[i] >= best - params.tie_tolerance) {
      ++within;
      if (chosen < 0) chosen = static_cast<int>(i);
    }
  result.chosen = chosen;
  result.tie_broken = within > 1;
  return result;
}

}  // namespace aura
