#include "aura/aura/orchestrator.hpp"

#include <cmath>
#include <string>

#include "aura/core/errors.hpp"
#include "aura/core/rollout.hpp"
#include "aura/envs/families.hpp"

namespace aura {

std::string canonical_goal_key(const Eigen::VectorXd& goal) {
  // Integer micro-units sidestep printf rounding quirks and -0.0.
  std::string key;
  for (Eigen::Index i = 0; i < goal.size(); ++i) {
    long long m = std::llround(goal[i] * 1e6);
    if (m == 0) m = 0;  // collapse -0
    if (i > 0) key += ',';
    key += std::to_string(m);
  }
  return key;
}

// ─── Phases ──────────────────────────────────────────────────────────────────

Memory init_memory(const DomainDistribution& p_d, const AuraConfig& cfg) {
  Memory memory;
  memory.mode = cfg.mode;
  if (cfg.mode == AuraMode::Meta) {
    MetaTrainResult mt = meta_train(p_d, cfg.train);
    memory.init_iterations = mt.meta.iterations;
    memory.init_curve = std::move(mt.curve);
    memory.meta_policy = std::move(mt.meta);
  }
  // GC mode trains nothing up front: the goal-conditioned policy is specific
  // to one domain theory, so it is built on first contact with that domain.
  return memory;
}

DomainMemory& domain_adaptation(const DomainTheory& domain, Memory& memory,
                                const AuraConfig& cfg) {
  std::uint64_t id = domain.domain_id();
  auto it = memory.domain_entries.find(id);
  if (it != memory.domain_entries.end()) return it->second;

  DomainMemory entry;
  if (memory.mode == AuraMode::GC) {
    TrainResult res = gc_train(domain, cfg.train);
    entry.gc_cost = res.iterations;
    entry.gc_policy = std::move(res.policy);
    memory.domain_iterations += entry.gc_cost;
  }
  return memory.domain_entries.emplace(id, std::move(entry)).first->second;
}

std::vector<StochasticPolicy> goals_adaptation(
    const std::vector<Eigen::VectorXd>& dynamic_goals, const DomainTheory& domain,
    DomainMemory& domain_memory, Memory& memory, const AuraConfig& cfg) {
  if (dynamic_goals.empty())
    throw ConfigError("goal adaptation needs at least one dynamic goal");
  const std::uint64_t id = domain.domain_id();
  for (const auto& g : dynamic_goals)
    if (!domain.goal_space().contains(g))
      throw DomainError("dynamic goal " + canonical_goal_key(g) +
                        " lies outside the domain's goal space");

  std::vector<StochasticPolicy> policies;
  policies.reserve(dynamic_goals.size());
  for (const auto& g : dynamic_goals) {
    std::string key = canonical_goal_key(g);
    auto hit = domain_memory.goal_policies.find(key);
    if (hit != domain_memory.goal_policies.end()) {
      policies.push_back(hit->second.policy);  // recall: zero new iterations
      continue;
    }

    GoalEntry entry;
    if (memory.mode == AuraMode::GC) {
      if (!domain_memory.gc_policy)
        throw ConfigError("domain adaptation must run before goal adaptation");
      entry.policy = domain_memory.gc_policy->with_goal(g);
      entry.strategy = AdaptationStrategy::ZeroShot;
      if (cfg.probe_enabled) {
        double sr = success_rate(
            domain, entry.policy, g,
            derive_seed(cfg.probe_seed, {id, hash_vector(g)}), cfg.probe_rollouts);
        if (sr < cfg.probe_threshold) {
          TrainConfig ft = cfg.train;
          ft.iterations = cfg.fewshot_iterations;
          ft.seed = derive_seed(cfg.train.seed, {0xf5, id, hash_vector(g)});
          TrainResult res = gc_fine_tune(domain, g, ft, domain_memory.gc_policy->params);
          entry.policy = res.policy.with_goal(g);
          entry.cost = res.iterations;
          entry.strategy = AdaptationStrategy::FewShot;
        }
      }
    } else {
      if (!memory.meta_policy)
        throw ConfigError("memory was initialized without a meta-policy");
      TrainConfig ft = cfg.train;
      ft.iterations = cfg.fewshot_iterations;
      ft.seed = derive_seed(cfg.train.seed, {0xf5, id, hash_vector(g)});
      TrainResult res = fine_tune(*memory.meta_policy, domain, g, ft);
      entry.policy = std::move(res.policy);
      entry.cost = res.iterations;
      entry.strategy = AdaptationStrategy::FewShot;
    }
    memory.goal_iterations += entry.cost;
    policies.push_back(entry.policy);
    domain_memory.goal_policies.emplace(std::move(key), std::move(entry));
  }
  return policies;
}

RecognitionResult recognition_inference(
    const std::vector<StochasticPolicy>& goal_policies,
    const std::vector<Eigen::VectorXd>& dynamic_goals,
    const ObservationSequence& obs, const RecognitionParams& params) {
  return infer_goal(goal_policies, dynamic_goals, obs, params);
}

void update_memory(Memory& memory, int problem_index, std::uint64_t domain_id,
                   const std::vector<Eigen::VectorXd>& dynamic_goals,
                   const RecognitionResult& result, int adaptation_iterations,
                   long domain_stamp, long goals_stamp, long inference_stamp) {
  HistoryEntry h;
  h.problem_index = problem_index;
  h.domain_id = domain_id;
  h.dynamic_goals = dynamic_goals;
  h.chosen = result.chosen;
  h.metric = result.metric;
  h.scores = result.scores;
  h.adaptation_iterations = adaptation_iterations;
  h.domain_stamp = domain_stamp;
  h.goals_stamp = goals_stamp;
  h.inference_stamp = inference_stamp;
  h.update_stamp = ++memory.phase_clock;
  memory.history.push_back(std::move(h));
}

std::vector<RecognitionResult> solve_stream(const GDGRStream& stream,
                                            Memory& memory, const AuraConfig& cfg) {
  if (memory.mode != cfg.mode)
    throw ConfigError("memory and config disagree on the operating mode");
  if (memory.mode == AuraMode::GC && !stream.empty()) {
    std::uint64_t first = stream.front().domain->domain_id();
    for (const auto& p : stream)
      if (p.domain->domain_id() != first)
        throw ConfigError(
            "goal-conditioned mode assumes a single domain theory per stream; "
            "got problems from different domains");
  }

  std::vector<RecognitionResult> results;
  results.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const StreamProblem& p = stream[i];
    if (!p.domain) throw ConfigError("stream problem without a domain theory");

    long domain_stamp = ++memory.phase_clock;
    DomainMemory& dm = domain_adaptation(*p.domain, memory, cfg);

    long goals_before = memory.goal_iterations;
    long goals_stamp = ++memory.phase_clock;
    std::vector<StochasticPolicy> policies =
        goals_adaptation(p.dynamic_goals, *p.domain, dm, memory, cfg);

    long inference_stamp = ++memory.phase_clock;
    RecognitionResult res =
        recognition_inference(policies, p.dynamic_goals, p.observation, cfg.recognition);

    update_memory(memory, static_cast<int>(i), p.domain->domain_id(),
                  p.dynamic_goals, res,
                  static_cast<int>(memory.goal_iterations - goals_before),
                  domain_stamp, goals_stamp, inference_stamp);
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace aura
