#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "aura/core/errors.hpp"
#include "aura/core/rng.hpp"

namespace aura {

// ─── Action and goal spaces ─────────────────────────────────────────────────

struct ActionSpace {
  enum class Kind { Discrete, Box };

  Kind kind = Kind::Discrete;
  int count = 0;              // Discrete only
  Eigen::VectorXd low, high;  // Box only

  static ActionSpace discrete(int n) {
    ActionSpace a;
    a.kind = Kind::Discrete;
    a.count = n;
    return a;
  }

  static ActionSpace box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    ActionSpace a;
    a.kind = Kind::Box;
    a.low = std::move(lo);
    a.high = std::move(hi);
    return a;
  }

  bool is_discrete() const { return kind == Kind::Discrete; }

  // Length of the action vector as stored in trajectories. Discrete actions
  // are stored as a single index.
  int dim() const {
    return is_discrete() ? 1 : static_cast<int>(low.size());
  }

  Eigen::VectorXd sample_uniform(Rng& rng) const {
    if (is_discrete()) {
      Eigen::VectorXd a(1);
      a[0] = static_cast<double>(rng.uniform_int(count));
      return a;
    }
    Eigen::VectorXd a(low.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
      a[i] = rng.uniform(low[i], high[i]);
    return a;
  }
};

inline int discrete_action(const Eigen::VectorXd& action) {
  return static_cast<int>(std::lround(action[0]));
}

struct GoalSpace {
  enum class Kind { DiscreteSet, Box };

  Kind kind = Kind::DiscreteSet;
  std::vector<Eigen::VectorXd> points;  // DiscreteSet only, duplicate-free
  Eigen::VectorXd low, high;            // Box only, low < high componentwise
  double success_radius = 0.0;          // continuous families only

  static GoalSpace discrete_set(std::vector<Eigen::VectorXd> pts) {
    GoalSpace g;
    g.kind = Kind::DiscreteSet;
    g.points = std::move(pts);
    return g;
  }

  static GoalSpace box(Eigen::VectorXd lo, Eigen::VectorXd hi, double radius) {
    GoalSpace g;
    g.kind = Kind::Box;
    g.low = std::move(lo);
    g.high = std::move(hi);
    g.success_radius = radius;
    return g;
  }

  int dim() const {
    if (kind == Kind::DiscreteSet)
      return points.empty() ? 0 : static_cast<int>(points.front().size());
    return static_cast<int>(low.size());
  }

  bool contains(const Eigen::VectorXd& g) const {
    if (kind == Kind::DiscreteSet) {
      for (const auto& p : points)
        if (p.size() == g.size() && (p - g).lpNorm<Eigen::Infinity>() < 1e-12)
          return true;
      return false;
    }
    if (g.size() != low.size()) return false;
    return (g.array() >= low.array()).all() && (g.array() <= high.array()).all();
  }

  // Samples from the goal distribution p_g: uniform over the set or the box.
  Eigen::VectorXd sample(Rng& rng) const {
    if (kind == Kind::DiscreteSet)
      return points[rng.uniform_int(static_cast<int>(points.size()))];
    Eigen::VectorXd g(low.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
      g[i] = rng.uniform(low[i], high[i]);
    return g;
  }
};

// ─── Domain theory ──────────────────────────────────────────────────────────

struct StepResult {
  Eigen::VectorXd next_state;
  double reward = 0.0;
  bool terminal = false;
  bool success = false;  // terminal by goal achievement (vs failure/timeout)
  bool clamped = false;  // out-of-bounds action was clamped
};

// A goal-augmented MDP fragment: dynamics, goal space, and the achieved-goal
// projection. Immutable after construction; step() is a pure function, so
// instances are safe to share across threads.
class DomainTheory {
 public:
  virtual ~DomainTheory() = default;

  virtual int state_dim() const = 0;
  virtual const ActionSpace& action_space() const = 0;
  virtual const GoalSpace& goal_space() const = 0;
  virtual int max_steps() const = 0;

  virtual Eigen::VectorXd initial_state() const = 0;

  // Applies one transition. `step_number` is the 1-based index of this step
  // within the episode; step-count-dependent rewards use it.
  virtual StepResult step(const Eigen::VectorXd& state,
                          const Eigen::VectorXd& action,
                          const Eigen::VectorXd& goal,
                          int step_number) const = 0;

  // phi: projects a state onto the goal space.
  virtual Eigen::VectorXd achieved_goal(const Eigen::VectorXd& state) const = 0;

  // Stable 64-bit identifier: FNV-1a of the canonical serialized spec.
  virtual std::uint64_t domain_id() const = 0;

  // Canonical spec serialization (JSON text, sorted keys).
  virtual std::string spec_text() const = 0;

  // Tabular support; 0 / -1 for continuous families.
  virtual int discrete_state_count() const { return 0; }
  virtual int state_index(const Eigen::VectorXd&) const { return -1; }
};

using DomainPtr = std::shared_ptr<const DomainTheory>;

// ─── Trajectories ───────────────────────────────────────────────────────────

struct TrajectoryStep {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool terminal = false;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  Eigen::VectorXd goal;
  std::uint64_t seed = 0;
  bool success = false;
  int clamped_steps = 0;

  int length() const { return static_cast<int>(steps.size()); }

  double total_reward() const {
    double r = 0.0;
    for (const auto& s : steps) r += s.reward;
    return r;
  }
};

// Sum_t gamma^t * r_t over the trajectory's own rewards.
inline double discounted_return(const Trajectory& traj, double gamma) {
  double acc = 0.0;
  double g = 1.0;
  for (const auto& s : traj.steps) {
    acc += g * s.reward;
    g *= gamma;
  }
  return acc;
}

// Minimal policy surface the simulator needs; the learn module provides the
// concrete representations.
class PolicyInterface {
 public:
  virtual ~PolicyInterface() = default;
  virtual int state_dim() const = 0;
  virtual bool discrete_actions() const = 0;
  // Number of discrete actions, or the continuous action dimension.
  virtual int action_dim() const = 0;
  virtual Eigen::VectorXd sample_action(const Eigen::VectorXd& state,
                                        const Eigen::VectorXd* goal,
                                        Rng& rng) const = 0;
  // Mode of the action distribution (argmax / mean).
  virtual Eigen::VectorXd greedy_action(const Eigen::VectorXd& state,
                                        const Eigen::VectorXd* goal) const = 0;
};

}  // namespace aura
