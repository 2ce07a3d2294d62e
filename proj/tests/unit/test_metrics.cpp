#include <cmath>
#include <vector>

#include "aura/bench/metrics.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aura;

namespace {

ProblemRecord record(int true_goal, int chosen, int goal_count,
                     double observability = 0.1, double noise = 0.0,
                     int iterations = 0) {
  ProblemRecord r;
  r.observability = observability;
  r.noise = noise;
  r.goal_count = goal_count;
  r.true_goal = true_goal;
  r.chosen = chosen;
  r.correct = true_goal == chosen;
  r.train_iterations = iterations;
  return r;
}

}  // namespace

TEST_CASE("all-correct records score one across the board") {
  std::vector<ProblemRecord> records;
  for (int i = 0; i < 6; ++i) records.push_back(record(i % 3, i % 3, 3));
  MetricsReport report = compute_metrics(records);
  REQUIRE(report.cells.size() == 1);
  const CellAggregate& cell = report.cells[0];
  CHECK(cell.problems == 6);
  CHECK(cell.accuracy == 1.0);
  CHECK(cell.precision == 1.0);
  CHECK(cell.recall == 1.0);
  CHECK(cell.f_score == 1.0);
  CHECK(cell.micro_f == 1.0);
  CHECK(cell.accuracy_std == 0.0);
  CHECK(cell.f_score_std == 0.0);
}

TEST_CASE("a two-class confusion matrix reproduces hand-computed macros") {
  // confusion (true x chosen): [[4, 1], [2, 3]]
  std::vector<ProblemRecord> records;
  for (int i = 0; i < 4; ++i) records.push_back(record(0, 0, 2));
  records.push_back(record(0, 1, 2));
  for (int i = 0; i < 2; ++i) records.push_back(record(1, 0, 2));
  for (int i = 0; i < 3; ++i) records.push_back(record(1, 1, 2));

  const CellAggregate& cell = compute_metrics(records).cells[0];
  CHECK(cell.accuracy == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(cell.precision == doctest::Approx((4.0 / 6.0 + 3.0 / 4.0) / 2.0).epsilon(1e-12));
  CHECK(cell.recall == doctest::Approx((4.0 / 5.0 + 3.0 / 5.0) / 2.0).epsilon(1e-12));
  double f0 = 2.0 * (4.0 / 6.0) * 0.8 / (4.0 / 6.0 + 0.8);
  double f1 = 2.0 * 0.75 * 0.6 / (0.75 + 0.6);
  CHECK(cell.f_score == doctest::Approx((f0 + f1) / 2.0).epsilon(1e-12));
  CHECK(cell.micro_f == doctest::Approx(0.7).epsilon(1e-12));

  // macro-F averages per-class harmonic means rather than harmonizing the
  // macro precision/recall
  double wrong = 2.0 * cell.precision * cell.recall / (cell.precision + cell.recall);
  CHECK(cell.f_score != doctest::Approx(wrong).epsilon(1e-6));
}

TEST_CASE("single-goal problems aggregate to the trivial cell") {
  std::vector<ProblemRecord> records{record(0, 0, 1), record(0, 0, 1)};
  const CellAggregate& cell = compute_metrics(records).cells[0];
  CHECK(cell.goal_count == 1);
  CHECK(cell.accuracy == 1.0);
  CHECK(cell.f_score == 1.0);
}

TEST_CASE("classes absent from both axes are excluded from macro averages") {
  // goal_count 3 but class 2 never appears as truth or prediction
  std::vector<ProblemRecord> records{record(0, 0, 3), record(1, 1, 3),
                                     record(0, 1, 3)};
  const CellAggregate& cell = compute_metrics(records).cells[0];
  // class 0: P=1, R=1/2, F=2/3; class 1: P=1/2, R=1, F=2/3
  CHECK(cell.precision == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(cell.recall == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(cell.f_score == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(cell.accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("a never-predicted class contributes zero precision, not a crash") {
  // truth sometimes class 1, prediction never: P(1)=0 by the zero rule
  std::vector<ProblemRecord> records{record(0, 0, 2), record(1, 0, 2)};
  const CellAggregate& cell = compute_metrics(records).cells[0];
  // class 0: P=1/2, R=1, F=2/3; class 1: P=0, R=0, F=0
  CHECK(cell.precision == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(cell.recall == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cell.f_score == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("aggregates agree with an independent map-based oracle") {
  Rng rng(101);
  std::vector<ProblemRecord> records;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 1000; ++i) {
    int t = rng.uniform_int(4);
    int c = rng.uniform_int(4);
    records.push_back(record(t, c, 4, 0.3, 0.2));
    pairs.emplace_back(t, c);
  }
  const CellAggregate& cell = compute_metrics(records).cells[0];
  oracle::MacroMetrics expect = oracle::macro_oracle(pairs, 4);
  CHECK(cell.accuracy == doctest::Approx(expect.accuracy).epsilon(1e-12));
  CHECK(cell.precision == doctest::Approx(expect.precision).epsilon(1e-12));
  CHECK(cell.recall == doctest::Approx(expect.recall).epsilon(1e-12));
  CHECK(cell.f_score == doctest::Approx(expect.f_score).epsilon(1e-12));
  CHECK(cell.micro_f == doctest::Approx(expect.micro_f).epsilon(1e-12));
  CHECK(cell.accuracy_std ==
        doctest::Approx(oracle::correctness_std(pairs)).epsilon(1e-12));
  CHECK(cell.precision_std == cell.accuracy_std);
  CHECK(cell.f_score_std == cell.accuracy_std);
}

TEST_CASE("records split into cells sorted by observability, noise, and goals") {
  std::vector<ProblemRecord> records;
  records.push_back(record(0, 0, 3, 0.3, 0.0, 7));
  records.push_back(record(0, 0, 2, 0.1, 0.5, 4));
  records.push_back(record(0, 1, 2, 0.1, 0.0, 3));
  records.push_back(record(1, 1, 2, 0.1, 0.0, 2));
  records.push_back(record(0, 0, 3, 0.1, 0.0, 1));

  MetricsReport report = compute_metrics(records);
  REQUIRE(report.cells.size() == 4);
  CHECK(report.cells[0].observability == 0.1);
  CHECK(report.cells[0].noise == 0.0);
  CHECK(report.cells[0].goal_count == 2);
  CHECK(report.cells[0].problems == 2);
  CHECK(report.cells[0].train_iterations == 5);
  CHECK(report.cells[1].goal_count == 3);
  CHECK(report.cells[1].train_iterations == 1);
  CHECK(report.cells[2].noise == 0.5);
  CHECK(report.cells[3].observability == 0.3);
  CHECK(report.records.size() == records.size());
}

TEST_CASE("metrics reject empty and malformed record sets") {
  CHECK_THROWS_AS(compute_metrics({}), ConfigError);
  CHECK_THROWS_AS(compute_metrics({record(0, 0, 0)}), ConfigError);
  CHECK_THROWS_AS(compute_metrics({record(3, 0, 3)}), ConfigError);
  CHECK_THROWS_AS(compute_metrics({record(0, -1, 3)}), ConfigError);
  CHECK_THROWS_AS(compute_metrics({record(0, 5, 3)}), ConfigError);
}
