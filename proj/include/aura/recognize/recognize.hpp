#pragma once

#include <vector>

#include "aura/learn/policy.hpp"
#include "aura/recognize/observation.hpp"

namespace aura {

// Smoothed categorical distribution per distinct observed state:
// p(a|s) = (1 - epsilon) * freq(a|s) + epsilon / n_actions.
struct PseudoPolicy {
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> rows;  // state, probs
  double epsilon = 0.01;

  const Eigen::VectorXd& probs_at(const Eigen::VectorXd& state) const;
};

PseudoPolicy build_pseudo_policy(const ObservationSequence& obs, int n_actions,
                                 double epsilon);

// Recognition score between a candidate policy and the observations: the sum
// over observed pairs of pi_g(a_i|s_i) * log(pi_g(a_i|s_i) / pi_O(a_i|s_i)).
// Lower is a better match. The per-pair form is not a full KL and can be
// negative; full_kl switches to summing the complete per-state divergence.
double kl_score(const StochasticPolicy& policy_g, const ObservationSequence& obs,
                double epsilon, bool full_kl = false);

// Mean over observed pairs of the expected L1 distance between the observed
// action and actions drawn from the policy at that state; n_samples = 0 uses
// the gaussian mean (deterministic mode).
double wasserstein_score(const ObservationSequence& obs,
                         const StochasticPolicy& policy,
                         const Eigen::VectorXd& goal, int n_samples,
                         std::uint64_t rng_seed);

enum class Metric : int { KL = 0, Wasserstein = 1 };

struct RecognitionParams {
  Metric metric = Metric::KL;
  double epsilon = 0.01;    // pseudo-policy smoothing
  bool full_kl = false;
  int n_samples = 16;       // wasserstein draws; 0 = deterministic mean mode
  std::uint64_t seed = 0;
  double tie_tolerance = 1e-9;
  // Scoring-time sharpness applied to every candidate (1 = use as trained).
  double logit_scale = 1.0;
  double sigma_scale = 1.0;
};

struct RecognitionResult {
  std::vector<Eigen::VectorXd> goals;  // candidate order as given
  std::vector<double> scores;          // similarity, higher = more likely
  int chosen = 0;                      // index into goals
  Metric metric = Metric::KL;
  bool tie_broken = false;
};

// Scores every candidate (similarity = negated distance) and picks the
// argmax; ties within tie_tolerance go to the lowest index.
RecognitionResult infer_goal(const std::vector<StochasticPolicy>& candidates,
                             const std::vector<Eigen::VectorXd>& goals,
                             const ObservationSequence& obs,
                             const RecognitionParams& params);

}  // namespace aura
