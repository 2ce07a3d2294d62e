#include "aura/core/rollout.hpp"
#include "aura/learn/train.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace aura;

TEST_CASE("one-step corridor is solved almost immediately") {
  auto domain = support::grid_domain(2, 1, 0, 0, 1, {{1, 0}});
  QLearnConfig cfg;
  cfg.episodes = 200;
  cfg.seed = 1;
  TrainResult res = q_learn(*domain, support::vec({1.0, 0.0}), cfg);
  CHECK(res.iterations == 200);
  CHECK(res.curve.size() == 200);
  CHECK(res.policy.domain_id == domain->domain_id());

  Trajectory traj = rollout(*domain, res.policy, support::vec({1.0, 0.0}), 0,
                            {.greedy = true});
  CHECK(traj.success);
  CHECK(traj.length() == 1);
  // max_steps defaults to 4*2*1 = 8, so the terminal reward is 1 - 0.9/8
  CHECK(traj.total_reward() == doctest::Approx(1.0 - 0.9 / 8.0).epsilon(1e-12));
}

TEST_CASE("the greedy policy attains the shortest-path return on a 5x5 grid") {
  auto domain = support::grid_domain(5, 5, 0, 0, 1, {{4, 3}});
  Eigen::VectorXd goal = support::vec({4.0, 3.0});
  QLearnConfig cfg;
  cfg.seed = 7;
  TrainResult res = q_learn(*domain, goal, cfg);

  auto plan = oracle::make_grid_plan(domain->spec(), 4, 3);
  double expect = oracle::optimal_grid_return(domain->spec(), plan, 0, 0, 1);
  Trajectory traj = rollout(*domain, res.policy, goal, 0, {.greedy = true});
  REQUIRE(traj.success);
  CHECK(traj.total_reward() == doctest::Approx(expect).epsilon(1e-6));
  CHECK(success_rate(*domain, res.policy, goal, 3, 100) >= 0.99);
}

TEST_CASE("learning routes around lava") {
  auto domain = support::grid_domain(5, 3, 0, 1, 1, {{4, 1}}, {{2, 1}});
  Eigen::VectorXd goal = support::vec({4.0, 1.0});
  QLearnConfig cfg;
  cfg.seed = 11;
  TrainResult res = q_learn(*domain, goal, cfg);

  Trajectory traj = rollout(*domain, res.policy, goal, 0, {.greedy = true});
  REQUIRE(traj.success);
  auto plan = oracle::make_grid_plan(domain->spec(), 4, 1);
  CHECK(traj.total_reward() ==
        doctest::Approx(oracle::optimal_grid_return(domain->spec(), plan, 0, 1, 1))
            .epsilon(1e-6));
  for (const auto& step : traj.steps) {
    GridState s = grid_decode(domain->spec(), step.next_state);
    CHECK(!domain->spec().is_lava(s.x, s.y));
  }
}

TEST_CASE("q-learning is deterministic in the seed") {
  auto domain = support::grid_domain(4, 4, 0, 0, 1, {{3, 3}});
  Eigen::VectorXd goal = support::vec({3.0, 3.0});
  QLearnConfig cfg;
  cfg.episodes = 300;
  cfg.seed = 21;
  TrainResult a = q_learn(*domain, goal, cfg);
  TrainResult b = q_learn(*domain, goal, cfg);
  CHECK(a.policy.params == b.policy.params);
  cfg.seed = 22;
  TrainResult c = q_learn(*domain, goal, cfg);
  CHECK(a.policy.params != c.policy.params);
}

TEST_CASE("q-learning rejects continuous domains and foreign goals") {
  auto maze = support::open_maze(6, 2.5, 2.5, {{4, 4}});
  QLearnConfig cfg;
  CHECK_THROWS_AS(q_learn(*maze, support::vec({4.5, 4.5}), cfg), ConfigError);

  auto reach = support::reach_domain();
  CHECK_THROWS_AS(q_learn(*reach, support::vec({0.5, 0.5, 0.5}), cfg), ConfigError);

  auto grid = support::grid_domain(4, 4, 0, 0, 1, {{3, 3}});
  CHECK_THROWS_AS(q_learn(*grid, support::vec({2.0, 2.0}), cfg), DomainError);
}
