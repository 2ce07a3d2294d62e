#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aura/learn/train.hpp"
#include "aura/recognize/recognize.hpp"

namespace aura {

enum class AuraMode : int { GC = 0, Meta = 1 };

enum class AdaptationStrategy : int { ZeroShot = 0, FewShot = 1, Recall = 2 };

// Continuous goals are rounded to 1e-6 so "the same goal seen again" is
// well-defined as a cache key.
std::string canonical_goal_key(const Eigen::VectorXd& goal);

struct GoalEntry {
  StochasticPolicy policy;
  int cost = 0;  // training iterations spent creating this entry
  AdaptationStrategy strategy = AdaptationStrategy::ZeroShot;
};

struct DomainMemory {
  std::optional<StochasticPolicy> gc_policy;
  int gc_cost = 0;
  std::map<std::string, GoalEntry> goal_policies;
};

struct HistoryEntry {
  int problem_index = 0;
  std::uint64_t domain_id = 0;
  std::vector<Eigen::VectorXd> dynamic_goals;
  int chosen = -1;
  Metric metric = Metric::KL;
  std::vector<double> scores;
  int adaptation_iterations = 0;  // goal-adaptation cost for this problem
  // Monotonic stamps recording the phase order within the stream.
  long domain_stamp = 0, goals_stamp = 0, inference_stamp = 0, update_stamp = 0;
};

struct Memory {
  AuraMode mode = AuraMode::Meta;
  std::optional<MetaPolicy> meta_policy;
  std::vector<IterationStat> init_curve;  // meta-training curve, not persisted
  std::map<std::uint64_t, DomainMemory> domain_entries;
  std::vector<HistoryEntry> history;

  // Accounting across the memory's lifetime.
  long init_iterations = 0;    // meta-training cost (amortized over streams)
  long domain_iterations = 0;  // GC per-domain training cost
  long goal_iterations = 0;    // summed per-goal adaptation cost
  long phase_clock = 0;
};

struct AuraConfig {
  AuraMode mode = AuraMode::Meta;
  TrainConfig train;          // init-phase budgets (meta_train / gc_train)
  int fewshot_iterations = 25;  // per-goal fine-tuning budget
  // GC competence probe: escalate zero-shot binding to few-shot fine-tuning
  // when greedy success over probe_rollouts falls below probe_threshold.
  bool probe_enabled = true;
  int probe_rollouts = 20;
  double probe_threshold = 0.8;
  std::uint64_t probe_seed = 0;
  RecognitionParams recognition;
};

Memory init_memory(const DomainDistribution& p_d, const AuraConfig& cfg);

// Returns the (possibly freshly created) per-domain memory. GC mode trains
// the goal-conditioned policy on first contact with a domain; Meta mode
// defers all training to goal adaptation.
DomainMemory& domain_adaptation(const DomainTheory& domain, Memory& memory,
                                const AuraConfig& cfg);

// Per goal: recall a cached policy, bind the goal zero-shot into the GC
// policy (optionally escalating to few-shot on a failed competence probe),
// or few-shot fine-tune the meta-policy. Returns policies aligned with DG.
std::vector<StochasticPolicy> goals_adaptation(
    const std::vector<Eigen::VectorXd>& dynamic_goals, const DomainTheory& domain,
    DomainMemory& domain_memory, Memory& memory, const AuraConfig& cfg);

RecognitionResult recognition_inference(
    const std::vector<StochasticPolicy>& goal_policies,
    const std::vector<Eigen::VectorXd>& dynamic_goals,
    const ObservationSequence& obs, const RecognitionParams& params);

void update_memory(Memory& memory, int problem_index, std::uint64_t domain_id,
                   const std::vector<Eigen::VectorXd>& dynamic_goals,
                   const RecognitionResult& result, int adaptation_iterations,
                   long domain_stamp, long goals_stamp, long inference_stamp);

// One GR problem as the recognizer sees it (no ground-truth goal).
struct StreamProblem {
  DomainPtr domain;
  std::vector<Eigen::VectorXd> dynamic_goals;
  ObservationSequence observation;
};

using GDGRStream = std::vector<StreamProblem>;

// Runs the adaptation/inference/update phases over every problem in order.
// GC mode requires all problems to share one domain theory.
std::vector<RecognitionResult> solve_stream(const GDGRStream& stream,
                                            Memory& memory, const AuraConfig& cfg);

}  // namespace aura
