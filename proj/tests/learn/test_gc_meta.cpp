#include <cmath>

#include "aura/core/rollout.hpp"
#include "aura/learn/train.hpp"
#include "doctest.h"
#include "learn/pg_common.hpp"
#include "support.hpp"

using namespace aura;

namespace {

DomainDistribution tiny_grid_family() {
  DomainDistribution dist;
  dist.family = DomainDistribution::Family::Grid;
  dist.grid.width = 3;
  dist.grid.height = 3;
  dist.grid.lava_min = 0;
  dist.grid.lava_max = 0;
  dist.grid.start_x = 0;
  dist.grid.start_y = 0;
  dist.grid.start_dir = 1;
  dist.grid.goals_per_domain = 2;
  dist.grid.max_steps = 24;
  return dist;
}

TrainConfig tiny_meta_config() {
  TrainConfig cfg;
  cfg.meta_iterations = 1;
  cfg.meta_bsz = 2;
  cfg.adapt_bsz = 3;
  cfg.adapt_steps = 0;
  cfg.adapt_lr = 0.05;
  cfg.meta_lr = 1.0;
  cfg.plateau_stop = false;
  cfg.seed = 42;
  return cfg;
}

}  // namespace

// ─── Goal-conditioned training ───────────────────────────────────────────────

TEST_CASE("gc training produces a goal-conditioned policy that generalizes") {
  auto domain = support::reach_domain(0.25, 40);
  TrainConfig cfg;
  cfg.iterations = 120;
  cfg.batch_size = 20;
  cfg.lr = 0.1;
  cfg.max_kl = 0.05;
  cfg.plateau_stop = false;
  cfg.seed = 17;

  TrainResult res = gc_train(*domain, cfg);
  CHECK(res.policy.arch.goal_dim == 3);
  CHECK(res.policy.arch.state_dim == 3);
  CHECK(res.iterations == 120);
  CHECK_THROWS_AS(res.policy.input_for(support::vec({0.0, 0.0, 0.0}), nullptr),
                  ConfigError);

  Rng untouched_rng(17);
  StochasticPolicy untrained = StochasticPolicy::make_gaussian(3, 3, 3, untouched_rng);

  Rng goal_rng(91);
  double trained_hits = 0.0, untrained_hits = 0.0;
  const int n_goals = 30;
  for (int i = 0; i < n_goals; ++i) {
    Eigen::VectorXd g = domain->goal_space().sample(goal_rng);
    trained_hits += success_rate(*domain, res.policy, g, derive_seed(5, {0u, (std::uint64_t)i}), 1);
    untrained_hits += success_rate(*domain, untrained, g, derive_seed(5, {1u, (std::uint64_t)i}), 1);
  }
  CHECK(trained_hits / n_goals >= 0.8);
  CHECK(trained_hits > untrained_hits);
}

TEST_CASE("gc training is deterministic per seed") {
  auto domain = support::reach_domain(0.3, 20);
  TrainConfig cfg;
  cfg.iterations = 5;
  cfg.batch_size = 5;
  cfg.plateau_stop = false;
  cfg.seed = 23;
  TrainResult a = gc_train(*domain, cfg);
  TrainResult b = gc_train(*domain, cfg);
  CHECK(a.policy.params == b.policy.params);
  for (std::size_t i = 0; i < a.curve.size(); ++i)
    CHECK(a.curve[i].mean_return == b.curve[i].mean_return);
}

// ─── Meta-training ───────────────────────────────────────────────────────────

TEST_CASE("one meta-iteration without inner steps reduces to the averaged task gradient") {
  DomainDistribution dist = tiny_grid_family();
  TrainConfig cfg = tiny_meta_config();

  MetaTrainResult lib = meta_train(dist, cfg);
  REQUIRE(lib.meta.iterations == 1);
  REQUIRE(lib.curve.size() == 1);
  CHECK(lib.meta.provenance == "grid");

  // independent replay of the documented update
  Task probe = sample_task(dist, derive_seed(cfg.seed, {0x3e7a0}));
  Rng init_rng(derive_seed(cfg.seed, {0x3e7a1}));
  StochasticPolicy policy = StochasticPolicy::make_categorical(
      probe.domain->state_dim(), 0, probe.domain->action_space().count, init_rng);

  Eigen::VectorXd meta_grad = Eigen::VectorXd::Zero(policy.params.size());
  std::vector<Eigen::MatrixXd> pools;
  double ret_sum = 0.0;
  for (std::uint64_t j = 0; j < 2; ++j) {
    Task task = sample_task(dist, derive_seed(cfg.seed, {0x3e7a2, 0, j}));
    auto fixed = [&task](int, Rng&) { return task.goal; };
    auto post = detail::collect_batch(*task.domain, policy, fixed, cfg.adapt_bsz,
                                      cfg.gamma,
                                      derive_seed(cfg.seed, {0x3e7a4, 0, j}));
    meta_grad += detail::policy_gradient(policy, post) / cfg.meta_bsz;
    pools.push_back(post.inputs);
    ret_sum += post.mean_return;
  }
  CHECK(lib.curve[0].mean_return == doctest::Approx(ret_sum / 2.0).epsilon(1e-15));

  Eigen::MatrixXd states(pools[0].rows() + pools[1].rows(), policy.arch.input_dim());
  states << pools[0], pools[1];  // batches are far below the pooling cap

  StochasticPolicy expect = policy;
  double alpha = cfg.meta_lr;
  for (int k = 0; k <= cfg.ls_max_steps; ++k, alpha *= cfg.backtrack_factor) {
    StochasticPolicy cand = policy.with_params(policy.params + alpha * meta_grad);
    if (mean_kl(policy, cand, states) <= cfg.max_kl) {
      expect = std::move(cand);
      break;
    }
  }
  CHECK(lib.meta.policy.params == expect.params);
}

TEST_CASE("meta-training is deterministic and inner adaptation changes the outcome") {
  DomainDistribution dist = tiny_grid_family();
  TrainConfig cfg = tiny_meta_config();
  cfg.meta_iterations = 3;

  MetaTrainResult a = meta_train(dist, cfg);
  MetaTrainResult b = meta_train(dist, cfg);
  CHECK(a.meta.policy.params == b.meta.policy.params);
  CHECK(a.meta.iterations == 3);
  CHECK(a.curve.size() == 3);

  cfg.adapt_steps = 2;
  MetaTrainResult c = meta_train(dist, cfg);
  CHECK(a.meta.policy.params != c.meta.policy.params);
}

TEST_CASE("a meta-policy fine-tunes on a concrete task from the same family") {
  DomainDistribution dist = tiny_grid_family();
  TrainConfig cfg = tiny_meta_config();
  cfg.meta_iterations = 4;
  cfg.adapt_steps = 1;
  MetaTrainResult meta = meta_train(dist, cfg);

  auto domain = support::grid_domain(3, 3, 0, 0, 1, {{2, 2}, {0, 2}}, {}, 24);
  TrainConfig ft;
  ft.iterations = 8;
  ft.batch_size = 5;
  ft.plateau_stop = false;
  ft.seed = 3;
  TrainResult tuned = fine_tune(meta.meta, *domain, support::vec({2.0, 2.0}), ft);
  CHECK(tuned.iterations == 8);
  CHECK(tuned.policy.arch.goal_dim == 0);
  CHECK(tuned.policy.params != meta.meta.policy.params);

  // family with mismatched state features is rejected
  auto maze = support::open_maze(6, 2.5, 2.5, {{4, 4}});
  CHECK_THROWS_AS(fine_tune(meta.meta, *maze, support::vec({4.5, 4.5}), ft),
                  ConfigError);
}
