#include "aura/bench/metrics.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include <Eigen/Dense>

#include "aura/core/errors.hpp"

namespace aura {
namespace {

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0));
}

}  // namespace

MetricsReport compute_metrics(const std::vector<ProblemRecord>& records) {
  if (records.empty())
    throw ConfigError("metrics need at least one problem record");

  for (const auto& r : records) {
    if (r.goal_count < 1) throw ConfigError("record with empty goal set");
    if (r.true_goal < 0 || r.true_goal >= r.goal_count)
      throw ConfigError("record true goal out of range");
    if (r.chosen < 0 || r.chosen >= r.goal_count)
      throw ConfigError("record chosen goal out of range");
  }

  MetricsReport report;
  report.records = records;

  std::map<std::tuple<double, double, int>, std::vector<const ProblemRecord*>> cells;
  for (const auto& r : records)
    cells[{r.observability, r.noise, r.goal_count}].push_back(&r);

  for (const auto& [key, rows] : cells) {
    CellAggregate agg;
    agg.observability = std::get<0>(key);
    agg.noise = std::get<1>(key);
    agg.goal_count = std::get<2>(key);
    agg.problems = static_cast<int>(rows.size());

    int k = agg.goal_count;
    Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(k, k);
    std::vector<double> correctness;
    correctness.reserve(rows.size());
    for (const ProblemRecord* r : rows) {
      confusion(r->true_goal, r->chosen) += 1;
      correctness.push_back(r->correct ? 1.0 : 0.0);
      agg.train_iterations += r->train_iterations;
    }

    double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
    int included = 0, tp_total = 0;
    for (int c = 0; c < k; ++c) {
      int predicted = confusion.col(c).sum();
      int actual = confusion.row(c).sum();
      int tp = confusion(c, c);
      tp_total += tp;
      if (predicted == 0 && actual == 0) continue;  // class absent from batch
      double p = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
      double r = actual > 0 ? static_cast<double>(tp) / actual : 0.0;
      double f = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
      p_sum += p;
      r_sum += r;
      f_sum += f;
      ++included;
    }

    double n = static_cast<double>(rows.size());
    agg.accuracy = static_cast<double>(tp_total) / n;
    agg.precision = p_sum / included;
    agg.recall = r_sum / included;
    agg.f_score = f_sum / included;
    agg.micro_f = static_cast<double>(tp_total) / n;
    agg.accuracy_std = sample_std(correctness, agg.accuracy);
    // Each problem contributes one label and one prediction, so its
    // precision, recall, and F all collapse to the correctness indicator.
    agg.precision_std = agg.accuracy_std;
    agg.recall_std = agg.accuracy_std;
    agg.f_score_std = agg.accuracy_std;

    report.cells.push_back(std::move(agg));
  }
  return report;
}

}  // namespace aura
