#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aura/bench/experiment.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace aura;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

ExperimentConfig fast_grid(RunMode mode) {
  ExperimentConfig cfg;
  cfg.name = "bench-test";
  cfg.family.family = DomainDistribution::Family::Grid;
  cfg.family.grid.width = 3;
  cfg.family.grid.height = 3;
  cfg.family.grid.lava_min = 0;
  cfg.family.grid.lava_max = 0;
  cfg.family.grid.start_x = 0;
  cfg.family.grid.start_y = 0;
  cfg.family.grid.goals_per_domain = 4;
  cfg.family.grid.max_steps = 12;
  cfg.mode = mode;
  cfg.observabilities = {0.5};
  cfg.noise_levels = {0.0};
  cfg.goal_counts = {2};
  cfg.problems = 2;
  cfg.fixed_domain = true;
  cfg.seed = 5;
  cfg.recognition.epsilon = 0.04;
  cfg.train.iterations = 8;
  cfg.train.batch_size = 5;
  cfg.train.lr = 0.05;
  cfg.train.plateau_stop = false;
  cfg.train.meta_iterations = 2;
  cfg.train.meta_bsz = 2;
  cfg.train.adapt_bsz = 3;
  cfg.train.adapt_steps = 1;
  cfg.qlearn.episodes = 300;
  cfg.fewshot_iterations = 5;
  cfg.probe_enabled = false;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv_tag(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a_str(bytes)));
  return std::string("fnv1a:") + buf;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) {
    auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
    path = fs::temp_directory_path() / (std::string(tag) + std::to_string(tick));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

// ─── Stream generation ───────────────────────────────────────────────────────

TEST_CASE("stream generation is deterministic in the config and seed") {
  ExperimentConfig cfg = fast_grid(RunMode::Graql);
  TrainingCache c1, c2;
  EvalStream a = generate_stream(cfg, cfg.seed, c1);
  EvalStream b = generate_stream(cfg, cfg.seed, c2);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  CHECK(a[0].domain == a[1].domain);  // fixed_domain shares one theory

  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].index == static_cast<int>(i));
    CHECK(a[i].domain->domain_id() == b[i].domain->domain_id());
    CHECK(a[i].true_goal == b[i].true_goal);
    REQUIRE(a[i].dynamic_goals.size() == 2);
    CHECK(a[i].true_goal >= 0);
    CHECK(a[i].true_goal < 2);
    CHECK(a[i].dynamic_goals[0] != a[i].dynamic_goals[1]);
    for (int g = 0; g < 2; ++g)
      CHECK(a[i].dynamic_goals[g] == b[i].dynamic_goals[g]);

    const ObservationSequence& oa = a[i].observation;
    const ObservationSequence& ob = b[i].observation;
    CHECK(oa.observability == 0.5);
    CHECK(oa.noise_level == 0.0);
    long expect = std::max<long>(1, std::lround(0.5 * oa.source_length));
    CHECK(static_cast<long>(oa.size()) == expect);
    REQUIRE(oa.size() == ob.size());
    for (std::size_t t = 0; t < oa.size(); ++t) {
      CHECK(oa.pairs[t].first == ob.pairs[t].first);
      CHECK(oa.pairs[t].second == ob.pairs[t].second);
    }
  }
}

TEST_CASE("the stream covers every cell in declaration order") {
  ExperimentConfig cfg = fast_grid(RunMode::Graql);
  cfg.observabilities = {0.3, 0.6};
  cfg.noise_levels = {0.0, 0.2};
  TrainingCache cache;
  EvalStream stream = generate_stream(cfg, cfg.seed, cache);
  REQUIRE(stream.size() == 2 * 2 * 1 * 2);

  int idx = 0;
  for (double obs : cfg.observabilities)
    for (double noise : cfg.noise_levels)
      for (int p = 0; p < cfg.problems; ++p, ++idx) {
        (void)p;
        CHECK(stream[idx].index == idx);
        CHECK(stream[idx].observation.observability == obs);
        CHECK(stream[idx].observation.noise_level == noise);
      }
}

TEST_CASE("the recognizer view strips ground truth but keeps the task") {
  ExperimentConfig cfg = fast_grid(RunMode::Graql);
  TrainingCache cache;
  EvalStream stream = generate_stream(cfg, cfg.seed, cache);
  GDGRStream view = recognizer_view(stream);
  REQUIRE(view.size() == stream.size());
  for (std::size_t i = 0; i < view.size(); ++i) {
    CHECK(view[i].domain == stream[i].domain);
    REQUIRE(view[i].dynamic_goals.size() == stream[i].dynamic_goals.size());
    for (std::size_t g = 0; g < view[i].dynamic_goals.size(); ++g)
      CHECK(view[i].dynamic_goals[g] == stream[i].dynamic_goals[g]);
    CHECK(view[i].observation.size() == stream[i].observation.size());
  }
}

// ─── Reference experts ───────────────────────────────────────────────────────

TEST_CASE("reference experts are memoized per goal and gated on competence") {
  ExperimentConfig cfg = fast_grid(RunMode::Graql);
  auto domain = support::grid_domain(3, 3, 0, 0, 1, {{2, 2}, {0, 2}}, {}, 12);
  Eigen::VectorXd goal = support::vec({2.0, 2.0});

  TrainingCache cache;
  const CachedPolicy& first = reference_expert(*domain, goal, cfg, true, cache);
  const CachedPolicy& again = reference_expert(*domain, goal, cfg, true, cache);
  CHECK(&first == &again);
  CHECK(cache.entries.size() == 1);
  CHECK(cache.entries.count(expert_key(*domain, goal, true)) == 1);
  CHECK(expert_key(*domain, goal, true).rfind("tab:", 0) == 0);
  CHECK(expert_key(*domain, goal, false).rfind("pg:", 0) == 0);
  CHECK(first.iterations > 0);

  // unreachable goal within the step budget: every restart misses the gate
  auto hopeless = support::grid_domain(6, 1, 0, 0, 1, {{5, 0}}, {}, 2);
  ExperimentConfig strict = fast_grid(RunMode::Draco);
  strict.expert.iterations = 2;
  strict.expert.min_success = 0.5;
  strict.expert.eval_rollouts = 3;
  strict.expert.max_restarts = 1;
  TrainingCache empty;
  CHECK_THROWS_AS(reference_expert(*hopeless, support::vec({5.0, 0.0}), strict,
                                   false, empty),
                  TrainingError);
}

// ─── Runners ─────────────────────────────────────────────────────────────────

TEST_CASE("the from-scratch baseline pays per problem while memory amortizes") {
  ExperimentConfig cfg = fast_grid(RunMode::Graql);
  TrainingCache cache;
  EvalStream stream = generate_stream(cfg, cfg.seed, cache);

  ExperimentConfig dcfg = fast_grid(RunMode::Draco);
  MetricsReport draco = run_draco_baseline(stream, dcfg);
  CHECK(draco.method == "draco");
  REQUIRE(draco.records.size() == 2);
  for (const ProblemRecord& r : draco.records)
    CHECK(r.train_iterations == 2 * dcfg.train.iterations);
  CHECK(draco.adaptation_iterations == 4 * dcfg.train.iterations);
  CHECK(draco.total_training_iterations == draco.adaptation_iterations);
  REQUIRE(draco.curves.size() == 4);
  CHECK(draco.curves[0].first == "p0_g0");
  CHECK(draco.curves[3].first == "p1_g1");
  CHECK(draco.curves[0].second.size() == 8);

  ExperimentConfig gcfg = fast_grid(RunMode::GC);
  MetricsReport gc = run_aura(stream, AuraMode::GC, gcfg);
  CHECK(gc.method == "gc");
  CHECK(gc.init_iterations == 0);
  CHECK(gc.domain_iterations == gcfg.train.iterations);
  CHECK(gc.adaptation_iterations == 0);  // zero-shot bindings are free
  CHECK(gc.total_training_iterations == gcfg.train.iterations);
  CHECK(gc.curves.empty());
  CHECK(gc.total_training_iterations < draco.total_training_iterations);

  ExperimentConfig mcfg = fast_grid(RunMode::Meta);
  MetricsReport meta = run_aura(stream, AuraMode::Meta, mcfg);
  CHECK(meta.method == "meta");
  CHECK(meta.init_iterations == 2);
  CHECK(meta.domain_iterations == 0);
  std::set<std::string> keys;
  for (const GRProblem& p : stream)
    for (const auto& g : p.dynamic_goals) keys.insert(canonical_goal_key(g));
  CHECK(meta.adaptation_iterations ==
        static_cast<long>(keys.size()) * mcfg.fewshot_iterations);
  CHECK(meta.total_training_iterations ==
        meta.init_iterations + meta.adaptation_iterations);
  REQUIRE(meta.curves.size() == 1);
  CHECK(meta.curves[0].first == "init");
  CHECK(meta.curves[0].second.size() == 2);
}

TEST_CASE("the tabular recognizer rejects continuous domains") {
  auto reach = support::reach_domain();
  GRProblem p;
  p.domain = reach;
  p.dynamic_goals = {support::vec({0.5, 0.5, 0.5}), support::vec({-0.5, -0.5, -0.5})};
  p.observation = support::make_obs(
      {{support::vec({0.0, 0.0, 0.0}), support::vec({0.1, 0.1, 0.1})}});
  EvalStream stream = {p};
  ExperimentConfig cfg = fast_grid(RunMode::Graql);
  CHECK_THROWS_AS(run_graql_baseline(stream, cfg), ConfigError);
}

TEST_CASE("single-candidate sanity streams recognize perfectly") {
  ExperimentConfig cfg = fast_grid(RunMode::Graql);
  cfg.allow_single_goal = true;
  cfg.goal_counts = {1};
  cfg.observabilities = {1.0};
  TrainingCache cache;
  EvalStream stream = generate_stream(cfg, cfg.seed, cache);
  MetricsReport rep = run_graql_baseline(stream, cfg);
  REQUIRE(rep.cells.size() == 1);
  CHECK(rep.cells[0].accuracy == 1.0);
  CHECK(rep.cells[0].f_score == 1.0);
  for (const ProblemRecord& r : rep.records) CHECK(r.correct);
}

// ─── Outputs ─────────────────────────────────────────────────────────────────

TEST_CASE("runs without records refuse to write outputs") {
  MetricsReport empty;
  empty.method = "draco";
  ExperimentConfig cfg = fast_grid(RunMode::Draco);
  TrainingCache cache;
  TempDir dir("aura_bench_empty_");
  CHECK_THROWS_AS(emit_outputs(empty, cfg, cache, dir.path.string()), ConfigError);
}

TEST_CASE("identical configs reproduce the run directory byte for byte") {
  TempDir d1("aura_bench_a_");
  TempDir d2("aura_bench_b_");
  ExperimentConfig cfg = fast_grid(RunMode::Graql);

  cfg.out_dir = d1.path.string();
  MetricsReport r1 = run_experiment(cfg);
  cfg.out_dir = d2.path.string();
  MetricsReport r2 = run_experiment(cfg);
  CHECK(r1.records.size() == r2.records.size());

  for (const char* name : {"metrics.csv", "records.csv", "learning_curves.csv"}) {
    std::string x = slurp(d1.path / name);
    std::string y = slurp(d2.path / name);
    CHECK(x == y);
    CHECK(!x.empty());
  }

  // one metrics row per cell plus the header
  std::string metrics = slurp(d1.path / "metrics.csv");
  long rows = std::count(metrics.begin(), metrics.end(), '\n');
  CHECK(rows == static_cast<long>(r1.cells.size()) + 1);

  // manifest hashes certify the emitted bytes
  json manifest = json::parse(slurp(d1.path / "manifest.json"));
  CHECK(manifest.at("format") == "aura-run-v1");
  CHECK(manifest.at("method") == "graql");
  for (const char* name : {"metrics.csv", "records.csv", "learning_curves.csv"})
    CHECK(manifest.at("outputs").at(name).get<std::string>() ==
          fnv_tag(slurp(d1.path / name)));
  for (const auto& [rel, tag] : manifest.at("policies").items()) {
    CHECK(fs::exists(d1.path / rel));
    CHECK(tag.get<std::string>().rfind("fnv1a:", 0) == 0);
  }

  json m2 = json::parse(slurp(d2.path / "manifest.json"));
  m2.erase("timings_seconds");
  manifest.erase("timings_seconds");
  m2.at("config").erase("out");
  manifest.at("config").erase("out");
  CHECK(manifest == m2);
}
