#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aura/learn/train.hpp"

namespace aura {

// One goal-recognition problem's outcome. Goal classes are positional: class
// c means "the c-th goal in that problem's candidate set", which makes
// problems with different concrete goal sets share a confusion matrix.
struct ProblemRecord {
  int problem_index = 0;
  double observability = 1.0;
  double noise = 0.0;
  int goal_count = 0;
  int true_goal = 0;  // positional class of the hidden goal
  int chosen = -1;    // positional class the recognizer picked
  std::vector<double> scores;
  bool correct = false;
  int train_iterations = 0;  // training cost attributed to this problem
};

// Aggregate for one (observability, noise, goal-count) cell. The point
// estimates come from the cell's pooled confusion matrix; the std columns
// treat each problem's correctness as a sample (for single-label problems
// per-problem precision/recall/F all equal the 0/1 correctness).
struct CellAggregate {
  double observability = 1.0;
  double noise = 0.0;
  int goal_count = 0;
  int problems = 0;
  double accuracy = 0.0, accuracy_std = 0.0;
  double precision = 0.0, precision_std = 0.0;
  double recall = 0.0, recall_std = 0.0;
  double f_score = 0.0, f_score_std = 0.0;
  double micro_f = 0.0;  // equals accuracy for single-label problems
  long train_iterations = 0;
};

struct PhaseSeconds {
  double init = 0.0;
  double adaptation = 0.0;
  double inference = 0.0;
};

struct MetricsReport {
  std::string method;
  std::vector<ProblemRecord> records;
  std::vector<CellAggregate> cells;  // sorted by (observability, noise, goals)

  // Training-iteration accounting. For baselines everything is from-scratch
  // per-problem cost; AURA splits the amortized init phase from per-domain
  // and per-problem adaptation.
  long init_iterations = 0;
  long domain_iterations = 0;
  long adaptation_iterations = 0;
  long total_training_iterations = 0;

  PhaseSeconds seconds;  // wall-clock; reported in the manifest, never in CSVs

  // Labeled training curves for learning_curves.csv.
  std::vector<std::pair<std::string, std::vector<IterationStat>>> curves;
};

// Builds per-cell aggregates from records: pooled confusion matrix over
// positional classes, macro precision/recall (zero-division -> 0), macro-F as
// the mean of per-class harmonic means, classes with zero predicted and zero
// actual instances excluded. Throws on an empty record set.
MetricsReport compute_metrics(const std::vector<ProblemRecord>& records);

}  // namespace aura
