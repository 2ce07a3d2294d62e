#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "aura/learn/baseline.hpp"
#include "aura/learn/policy.hpp"
#include "aura/learn/policy_io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace aura;

namespace {

StochasticPolicy fresh_categorical(int state_dim, int goal_dim, int n_actions,
                                   std::uint64_t seed = 1) {
  Rng rng(seed);
  return StochasticPolicy::make_categorical(state_dim, goal_dim, n_actions, rng);
}

StochasticPolicy fresh_gaussian(int state_dim, int goal_dim, int action_dim,
                                std::uint64_t seed = 1) {
  Rng rng(seed);
  return StochasticPolicy::make_gaussian(state_dim, goal_dim, action_dim, rng);
}

}  // namespace

// ─── Architecture bookkeeping ────────────────────────────────────────────────

TEST_CASE("parameter count is a pure function of the architecture") {
  auto cat = fresh_categorical(6, 0, 4);
  CHECK(cat.params.size() == 600 + 100 + 10000 + 100 + 400 + 4);
  CHECK(StochasticPolicy::param_count(cat.arch) == cat.params.size());

  auto gauss = fresh_gaussian(3, 3, 3);
  // input 6, two hidden layers of 100, 3 outputs, plus 3 log-sigmas
  CHECK(gauss.params.size() ==
        (100 * 6 + 100) + (100 * 100 + 100) + (3 * 100 + 3) + 3);

  auto tab = StochasticPolicy::make_tabular(12, 4, 0.1, 3, 1);
  CHECK(tab.params.size() == 48);
  CHECK(tab.params.isZero());
}

TEST_CASE("tabular probabilities are the tempered softmax of the Q row") {
  auto p = StochasticPolicy::make_tabular(4, 4, 0.5, 1, 1);
  // state (0, 0, dir 1) -> row 1
  for (int a = 0; a < 4; ++a) p.q_value(1, a) = 1.0 + a;
  GridSpec spec;
  spec.width = 1;
  spec.height = 1;
  Eigen::VectorXd state = grid_features(spec, {0, 0, 1});

  Eigen::VectorXd probs = p.action_probabilities(state);
  Eigen::VectorXd logits = support::vec({2.0, 4.0, 6.0, 8.0});
  Eigen::VectorXd expect = (logits.array() - logits.maxCoeff()).exp();
  expect /= expect.sum();
  CHECK((probs - expect).lpNorm<Eigen::Infinity>() < 1e-12);

  // logit_scale 2 at temperature 0.5 matches temperature 0.25
  auto sharp = p.with_scales(2.0, 1.0);
  auto quarter = StochasticPolicy::make_tabular(4, 4, 0.25, 1, 1);
  for (int a = 0; a < 4; ++a) quarter.q_value(1, a) = 1.0 + a;
  CHECK((sharp.action_probabilities(state) - quarter.action_probabilities(state))
            .lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("zero Q rows export the uniform distribution") {
  auto p = StochasticPolicy::make_tabular(4, 4, 0.1, 1, 1);
  GridSpec spec;
  spec.width = 1;
  spec.height = 1;
  Eigen::VectorXd probs = p.action_probabilities(grid_features(spec, {0, 0, 2}));
  for (int a = 0; a < 4; ++a) CHECK(probs[a] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("categorical probabilities normalize over random inputs") {
  auto p = fresh_categorical(6, 2, 5, 3);
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(
        1, 8, [&](Eigen::Index, Eigen::Index) { return rng.uniform(-2.0, 2.0); });
    Eigen::VectorXd probs = p.prob_rows(x).row(0);
    CHECK(std::abs(probs.sum() - 1.0) < 1e-9);
    CHECK(probs.minCoeff() >= 0.0);
  }
}

TEST_CASE("tabular probabilities normalize over every state") {
  auto domain = support::grid_domain(5, 5, 1, 1, 1, {{3, 3}});
  auto p = StochasticPolicy::make_tabular(domain->discrete_state_count(), 4, 0.1, 5, 5);
  Rng rng(5);
  for (int i = 0; i < domain->discrete_state_count(); ++i)
    p.q_value(i / 4, i % 4) = rng.uniform(-3.0, 3.0);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x)
      for (int d = 0; d < 4; ++d) {
        Eigen::VectorXd probs =
            p.action_probabilities(grid_features(domain->spec(), {x, y, d}));
        CHECK(std::abs(probs.sum() - 1.0) < 1e-9);
      }
}

// ─── Log-probability gradients ───────────────────────────────────────────────

namespace {

// Central finite differences on a subset of coordinates.
void check_gradient(const StochasticPolicy& policy, const Eigen::VectorXd& state,
                    const Eigen::VectorXd& action, std::uint64_t coord_seed) {
  Eigen::VectorXd analytic = policy.grad_log_prob(state, nullptr, action);
  REQUIRE(analytic.size() == policy.params.size());

  Rng rng(coord_seed);
  const double h = 1e-5;
  std::vector<Eigen::Index> coords;
  for (int i = 0; i < 48; ++i)
    coords.push_back(rng.uniform_int(static_cast<int>(policy.params.size())));
  if (policy.arch.flavor == PolicyFlavor::DiagonalGaussian)
    for (int i = 0; i < policy.arch.action_dim; ++i)
      coords.push_back(policy.params.size() - 1 - i);

  for (Eigen::Index c : coords) {
    Eigen::VectorXd up = policy.params, down = policy.params;
    up[c] += h;
    down[c] -= h;
    double lp_up = policy.with_params(up).log_prob(state, nullptr, action);
    double lp_down = policy.with_params(down).log_prob(state, nullptr, action);
    double fd = (lp_up - lp_down) / (2.0 * h);
    double scale = std::max({1.0, std::abs(fd), std::abs(analytic[c])});
    CHECK(std::abs(fd - analytic[c]) / scale < 1e-4);
  }
}

}  // namespace

TEST_CASE("categorical log-prob gradient matches finite differences") {
  auto p = fresh_categorical(4, 0, 3, 7);
  Rng rng(21);
  Eigen::VectorXd state = rng.normal_vec(4);
  check_gradient(p, state, support::act(1), 31);
}

TEST_CASE("gaussian log-prob gradient matches finite differences") {
  auto p = fresh_gaussian(3, 0, 2, 9);
  Rng rng(22);
  Eigen::VectorXd state = rng.normal_vec(3);
  Eigen::VectorXd action = rng.normal_vec(2);
  check_gradient(p, state, action, 32);
}

TEST_CASE("weighted batch gradient equals the weighted sum of row gradients") {
  auto p = fresh_gaussian(3, 0, 2, 13);
  Rng rng(14);
  Eigen::MatrixXd inputs(3, 3), actions(3, 2);
  for (int n = 0; n < 3; ++n) {
    inputs.row(n) = rng.normal_vec(3).transpose();
    actions.row(n) = rng.normal_vec(2).transpose();
  }
  Eigen::VectorXd weights = support::vec({0.5, -1.25, 2.0});

  Eigen::VectorXd batch = p.weighted_log_prob_grad(inputs, actions, weights);
  Eigen::VectorXd manual = Eigen::VectorXd::Zero(p.params.size());
  for (int n = 0; n < 3; ++n)
    manual += weights[n] * p.grad_log_prob(inputs.row(n).transpose(), nullptr,
                                           actions.row(n).transpose());
  CHECK((batch - manual).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("gaussian log-prob matches the closed form") {
  auto p = fresh_gaussian(2, 0, 2, 17);
  Eigen::VectorXd state = support::vec({0.3, -0.7});
  Eigen::VectorXd action = support::vec({0.2, 0.9});
  Eigen::VectorXd mean, std;
  p.gaussian_params(state, nullptr, mean, std);
  double expect = 0.0;
  for (int i = 0; i < 2; ++i) {
    double z = (action[i] - mean[i]) / std[i];
    expect += -0.5 * z * z - std::log(std[i]) - 0.5 * std::log(2.0 * M_PI);
  }
  CHECK(p.log_prob(state, nullptr, action) == doctest::Approx(expect).epsilon(1e-12));
}

// ─── Sampling, goals, and derived views ──────────────────────────────────────

TEST_CASE("sampling frequencies follow the categorical distribution") {
  auto p = fresh_categorical(2, 0, 3, 19);
  Eigen::VectorXd state = support::vec({0.4, -0.2});
  Eigen::VectorXd probs = p.action_probabilities(state);
  Rng rng(77);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(3);
  const int n = 20000;
  for (int i = 0; i < n; ++i)
    counts[discrete_action(p.sample_action(state, nullptr, rng))] += 1.0;
  for (int a = 0; a < 3; ++a) CHECK(std::abs(counts[a] / n - probs[a]) < 0.02);

  Rng r1(5), r2(5);
  CHECK(p.sample_action(state, nullptr, r1) == p.sample_action(state, nullptr, r2));
}

TEST_CASE("greedy action is the distribution mode") {
  auto cat = fresh_categorical(2, 0, 4, 23);
  Eigen::VectorXd state = support::vec({0.1, 0.6});
  Eigen::VectorXd probs = cat.action_probabilities(state);
  int greedy = discrete_action(cat.greedy_action(state, nullptr));
  for (int a = 0; a < 4; ++a) CHECK(probs[greedy] >= probs[a]);

  auto gauss = fresh_gaussian(2, 0, 3, 23);
  Eigen::VectorXd mean, std;
  gauss.gaussian_params(state, nullptr, mean, std);
  CHECK(gauss.greedy_action(state, nullptr) == mean);
}

TEST_CASE("bound goals override call-site goals") {
  auto p = fresh_gaussian(2, 2, 2, 29);
  Eigen::VectorXd state = support::vec({0.5, 0.5});
  Eigen::VectorXd g1 = support::vec({1.0, 0.0});
  Eigen::VectorXd g2 = support::vec({0.0, 1.0});

  auto bound = p.with_goal(g1);
  CHECK(bound.input_for(state, &g2) == p.input_for(state, &g1));
  CHECK(p.input_for(state, &g1).size() == 4);
  CHECK_THROWS_AS(p.input_for(state, nullptr), ConfigError);
  CHECK_THROWS_AS(p.with_goal(support::vec({1.0})), ConfigError);

  auto uncond = fresh_gaussian(2, 0, 2, 29);
  CHECK_THROWS_AS(uncond.with_goal(g1), ConfigError);
  CHECK_THROWS_AS(p.with_params(Eigen::VectorXd::Zero(3)), ConfigError);
}

TEST_CASE("scale views sharpen logits and widen sigmas without touching params") {
  auto cat = fresh_categorical(2, 0, 4, 31);
  Eigen::VectorXd state = support::vec({0.2, -0.4});
  double base_max = cat.action_probabilities(state).maxCoeff();
  double sharp_max = cat.with_scales(3.0, 1.0).action_probabilities(state).maxCoeff();
  CHECK(sharp_max > base_max);

  auto gauss = fresh_gaussian(2, 0, 2, 31);
  Eigen::VectorXd mean, std_base, std_wide;
  gauss.gaussian_params(state, nullptr, mean, std_base);
  Eigen::VectorXd mean2;
  gauss.with_scales(1.0, 2.5).gaussian_params(state, nullptr, mean2, std_wide);
  CHECK(mean2 == mean);
  CHECK((std_wide - 2.5 * std_base).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(gauss.with_scales(3.0, 2.5).params == gauss.params);
}

TEST_CASE("mean_kl is zero on itself and positive after perturbation") {
  auto p = fresh_categorical(3, 0, 4, 37);
  Rng rng(4);
  Eigen::MatrixXd inputs(5, 3);
  for (int n = 0; n < 5; ++n) inputs.row(n) = rng.normal_vec(3).transpose();
  CHECK(mean_kl(p, p, inputs) == doctest::Approx(0.0).epsilon(1e-12));

  Eigen::VectorXd bumped = p.params;
  bumped[0] += 0.5;
  CHECK(mean_kl(p, p.with_params(bumped), inputs) > 0.0);
}

TEST_CASE("gaussian mean_kl matches the closed form for sigma changes") {
  auto p = fresh_gaussian(2, 0, 2, 41);
  Eigen::VectorXd inflated = p.params;
  // log-sigma block sits at the tail; raise both sigmas from 1 to e
  inflated[inflated.size() - 1] += 1.0;
  inflated[inflated.size() - 2] += 1.0;
  Eigen::MatrixXd inputs(3, 2);
  inputs << 0.1, 0.2, -0.5, 0.4, 0.9, -0.9;
  double per_dim = 1.0 + 1.0 / (2.0 * std::exp(2.0)) - 0.5;
  CHECK(mean_kl(p, p.with_params(inflated), inputs) ==
        doctest::Approx(2.0 * per_dim).epsilon(1e-9));
}

// ─── Serialization ───────────────────────────────────────────────────────────

TEST_CASE("policy container round-trips bit-exactly") {
  auto dir = std::filesystem::temp_directory_path() / "aura_policy_io_test";
  std::filesystem::create_directories(dir);

  auto gauss = fresh_gaussian(3, 3, 3, 43).with_goal(support::vec({0.1, -0.2, 0.3}));
  gauss.domain_id = 0xabcdef0123456789ULL;
  auto path = (dir / "g.pol").string();
  save_policy(gauss, path);
  StochasticPolicy back = load_policy(path);
  CHECK(back.params == gauss.params);
  CHECK(back.bound_goal == gauss.bound_goal);
  CHECK(back.domain_id == gauss.domain_id);
  CHECK(back.arch.flavor == gauss.arch.flavor);
  CHECK(back.arch.goal_dim == 3);

  auto tab = StochasticPolicy::make_tabular(100, 4, 0.1, 5, 5);
  tab.q_value(7, 2) = -1.5;
  CHECK(policy_from_bytes(policy_to_bytes(tab)).params == tab.params);
  CHECK(policy_from_bytes(policy_to_bytes(tab)).arch.grid_width == 5);

  auto cat = fresh_categorical(6, 2, 4, 47);
  CHECK(policy_from_bytes(policy_to_bytes(cat)).params == cat.params);

  std::filesystem::remove_all(dir);
}

TEST_CASE("execution scales are never serialized") {
  auto p = fresh_categorical(2, 0, 3, 53).with_scales(4.0, 2.0);
  StochasticPolicy back = policy_from_bytes(policy_to_bytes(p));
  CHECK(back.logit_scale == 1.0);
  CHECK(back.sigma_scale == 1.0);
}

TEST_CASE("policy loader rejects corrupt containers") {
  auto p = fresh_categorical(2, 0, 3, 59);
  std::string bytes = policy_to_bytes(p);
  std::string corrupt = bytes;
  corrupt[0] ^= 0x5a;
  CHECK_THROWS_AS(policy_from_bytes(corrupt), IoError);
  CHECK_THROWS_AS(policy_from_bytes(bytes.substr(0, bytes.size() / 2)), IoError);
  CHECK_THROWS_AS(load_policy("/nonexistent/path/p.pol"), IoError);
}

// ─── Value baseline ──────────────────────────────────────────────────────────

TEST_CASE("value baseline fits a representable quadratic and beats the zero predictor") {
  Rng rng(61);
  const int n = 200;
  Eigen::MatrixXd inputs(n, 2);
  Eigen::VectorXd targets(n);
  for (int i = 0; i < n; ++i) {
    double x0 = rng.uniform(-1.0, 1.0), x1 = rng.uniform(-1.0, 1.0);
    inputs(i, 0) = x0;
    inputs(i, 1) = x1;
    targets[i] = 3.0 + 2.0 * x0 - x1 + 0.5 * x0 * x0 + x0 * x1;
  }
  ValueBaseline baseline(2);
  baseline.fit(inputs, targets);
  Eigen::VectorXd predicted = baseline.predict(inputs);
  double residual = (predicted - targets).squaredNorm();
  double zero_residual = targets.squaredNorm();
  CHECK(residual <= zero_residual);
  CHECK(residual / n < 1e-2);
}

TEST_CASE("value baseline polynomial features span bias, linear, and quadratic terms") {
  CHECK(ValueBaseline::feature_count(2) == 1 + 2 + 3);
  Eigen::MatrixXd x(1, 2);
  x << 2.0, 3.0;
  Eigen::MatrixXd f = ValueBaseline::poly_features(x);
  CHECK(f.rows() == 1);
  CHECK(f.cols() == 6);
  CHECK(f(0, 0) == 1.0);
}
