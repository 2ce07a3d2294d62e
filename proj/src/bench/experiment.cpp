#include "aura/bench/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "aura/core/csv.hpp"
#include "aura/core/errors.hpp"
#include "aura/core/rollout.hpp"
#include "aura/core/trajectory_io.hpp"
#include "aura/learn/policy_io.hpp"

namespace aura {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ─── JSON schema helpers ─────────────────────────────────────────────────────

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* context) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError(std::string("unknown key \"") + key + "\" in " + context);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

std::vector<std::pair<int, int>> cell_list(const json& j, const char* key) {
  std::vector<std::pair<int, int>> cells;
  for (const auto& c : j.at(key)) {
    if (!c.is_array() || c.size() != 2)
      throw ConfigError(std::string("\"") + key + "\" entries must be [x, y] pairs");
    cells.emplace_back(c[0].get<int>(), c[1].get<int>());
  }
  return cells;
}

Eigen::Vector3d vec3(const json& j, const char* key) {
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw ConfigError(std::string("\"") + key + "\" must be a 3-vector");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

json vec3_json(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

json cells_json(const std::vector<std::pair<int, int>>& cells) {
  json a = json::array();
  for (auto [x, y] : cells) a.push_back({x, y});
  return a;
}

DomainDistribution family_from_json(const json& j) {
  DomainDistribution d;
  std::string type = j.at("type").get<std::string>();
  if (type == "grid") {
    d.family = DomainDistribution::Family::Grid;
    check_keys(j, {"type", "width", "height", "lava_min", "lava_max", "start",
                   "goals_per_domain", "max_steps", "goal_pool"},
               "family");
    GridFamily& g = d.grid;
    g.width = get_or(j, "width", g.width);
    g.height = get_or(j, "height", g.height);
    g.lava_min = get_or(j, "lava_min", g.lava_min);
    g.lava_max = get_or(j, "lava_max", g.lava_max);
    if (j.contains("start")) {
      const json& s = j["start"];
      if (!s.is_array() || s.size() != 3)
        throw ConfigError("grid \"start\" must be [x, y, dir]");
      g.start_x = s[0].get<int>();
      g.start_y = s[1].get<int>();
      g.start_dir = s[2].get<int>();
    }
    g.goals_per_domain = get_or(j, "goals_per_domain", g.goals_per_domain);
    g.max_steps = get_or(j, "max_steps", g.max_steps);
    if (j.contains("goal_pool")) g.goal_pool = cell_list(j, "goal_pool");
  } else if (type == "maze") {
    d.family = DomainDistribution::Family::Maze;
    check_keys(j,
               {"type", "size_min", "size_max", "four_rooms_only",
                "goals_per_domain", "success_radius", "dt", "damping",
                "max_force", "max_steps", "goal_dist_min", "goal_dist_max",
                "fixed_start", "start", "goal_pool"},
               "family");
    MazeFamily& m = d.maze;
    m.size_min = get_or(j, "size_min", m.size_min);
    m.size_max = get_or(j, "size_max", m.size_max);
    m.four_rooms_only = get_or(j, "four_rooms_only", m.four_rooms_only);
    m.goals_per_domain = get_or(j, "goals_per_domain", m.goals_per_domain);
    m.success_radius = get_or(j, "success_radius", m.success_radius);
    m.dt = get_or(j, "dt", m.dt);
    m.damping = get_or(j, "damping", m.damping);
    m.max_force = get_or(j, "max_force", m.max_force);
    m.max_steps = get_or(j, "max_steps", m.max_steps);
    m.goal_dist_min = get_or(j, "goal_dist_min", m.goal_dist_min);
    m.goal_dist_max = get_or(j, "goal_dist_max", m.goal_dist_max);
    m.fixed_start = get_or(j, "fixed_start", m.fixed_start);
    if (j.contains("start")) {
      const json& s = j["start"];
      if (!s.is_array() || s.size() != 2)
        throw ConfigError("maze \"start\" must be [x, y]");
      m.start_x = s[0].get<double>();
      m.start_y = s[1].get<double>();
      m.fixed_start = true;
    }
    if (j.contains("goal_pool")) m.goal_pool = cell_list(j, "goal_pool");
  } else if (type == "reach") {
    d.family = DomainDistribution::Family::Reach;
    check_keys(j,
               {"type", "workspace_low", "workspace_high", "start", "goal_low",
                "goal_high", "success_radius", "max_velocity", "dt", "max_steps"},
               "family");
    ReachSpec& r = d.reach.base;
    if (j.contains("workspace_low")) r.workspace_low = vec3(j, "workspace_low");
    if (j.contains("workspace_high")) r.workspace_high = vec3(j, "workspace_high");
    if (j.contains("start")) r.start_effector = vec3(j, "start");
    if (j.contains("goal_low")) r.goal_low = vec3(j, "goal_low");
    if (j.contains("goal_high")) r.goal_high = vec3(j, "goal_high");
    r.success_radius = get_or(j, "success_radius", r.success_radius);
    r.max_velocity = get_or(j, "max_velocity", r.max_velocity);
    r.dt = get_or(j, "dt", r.dt);
    r.max_steps = get_or(j, "max_steps", r.max_steps);
  } else {
    throw ConfigError("unknown family type \"" + type + "\"");
  }
  return d;
}

json family_to_json(const DomainDistribution& d) {
  json j;
  switch (d.family) {
    case DomainDistribution::Family::Grid: {
      const GridFamily& g = d.grid;
      j["type"] = "grid";
      j["width"] = g.width;
      j["height"] = g.height;
      j["lava_min"] = g.lava_min;
      j["lava_max"] = g.lava_max;
      j["start"] = {g.start_x, g.start_y, g.start_dir};
      j["goals_per_domain"] = g.goals_per_domain;
      j["max_steps"] = g.max_steps;
      j["goal_pool"] = cells_json(g.goal_pool);
      break;
    }
    case DomainDistribution::Family::Maze: {
      const MazeFamily& m = d.maze;
      j["type"] = "maze";
      j["size_min"] = m.size_min;
      j["size_max"] = m.size_max;
      j["four_rooms_only"] = m.four_rooms_only;
      j["goals_per_domain"] = m.goals_per_domain;
      j["success_radius"] = m.success_radius;
      j["dt"] = m.dt;
      j["damping"] = m.damping;
      j["max_force"] = m.max_force;
      j["max_steps"] = m.max_steps;
      j["goal_dist_min"] = m.goal_dist_min;
      j["goal_dist_max"] = m.goal_dist_max;
      j["fixed_start"] = m.fixed_start;
      j["start"] = {m.start_x, m.start_y};
      j["goal_pool"] = cells_json(m.goal_pool);
      break;
    }
    case DomainDistribution::Family::Reach: {
      const ReachSpec& r = d.reach.base;
      j["type"] = "reach";
      j["workspace_low"] = vec3_json(r.workspace_low);
      j["workspace_high"] = vec3_json(r.workspace_high);
      j["start"] = vec3_json(r.start_effector);
      j["goal_low"] = vec3_json(r.goal_low);
      j["goal_high"] = vec3_json(r.goal_high);
      j["success_radius"] = r.success_radius;
      j["max_velocity"] = r.max_velocity;
      j["dt"] = r.dt;
      j["max_steps"] = r.max_steps;
      break;
    }
  }
  return j;
}

void train_from_json(const json& j, TrainConfig& t) {
  check_keys(j,
             {"lr", "batch_size", "gamma", "max_kl", "backtrack_factor",
              "ls_max_steps", "iterations", "adapt_lr", "adapt_steps",
              "adapt_bsz", "meta_bsz", "meta_lr", "meta_iterations",
              "plateau_stop", "plateau_window", "plateau_tol",
              "plateau_min_iterations"},
             "train");
  t.lr = get_or(j, "lr", t.lr);
  t.batch_size = get_or(j, "batch_size", t.batch_size);
  t.gamma = get_or(j, "gamma", t.gamma);
  t.max_kl = get_or(j, "max_kl", t.max_kl);
  t.backtrack_factor = get_or(j, "backtrack_factor", t.backtrack_factor);
  t.ls_max_steps = get_or(j, "ls_max_steps", t.ls_max_steps);
  t.iterations = get_or(j, "iterations", t.iterations);
  t.adapt_lr = get_or(j, "adapt_lr", t.adapt_lr);
  t.adapt_steps = get_or(j, "adapt_steps", t.adapt_steps);
  t.adapt_bsz = get_or(j, "adapt_bsz", t.adapt_bsz);
  t.meta_bsz = get_or(j, "meta_bsz", t.meta_bsz);
  t.meta_lr = get_or(j, "meta_lr", t.meta_lr);
  t.meta_iterations = get_or(j, "meta_iterations", t.meta_iterations);
  t.plateau_stop = get_or(j, "plateau_stop", t.plateau_stop);
  t.plateau_window = get_or(j, "plateau_window", t.plateau_window);
  t.plateau_tol = get_or(j, "plateau_tol", t.plateau_tol);
  t.plateau_min_iterations =
      get_or(j, "plateau_min_iterations", t.plateau_min_iterations);
}

json train_to_json(const TrainConfig& t) {
  return {{"lr", t.lr},
          {"batch_size", t.batch_size},
          {"gamma", t.gamma},
          {"max_kl", t.max_kl},
          {"backtrack_factor", t.backtrack_factor},
          {"ls_max_steps", t.ls_max_steps},
          {"iterations", t.iterations},
          {"adapt_lr", t.adapt_lr},
          {"adapt_steps", t.adapt_steps},
          {"adapt_bsz", t.adapt_bsz},
          {"meta_bsz", t.meta_bsz},
          {"meta_lr", t.meta_lr},
          {"meta_iterations", t.meta_iterations},
          {"plateau_stop", t.plateau_stop},
          {"plateau_window", t.plateau_window},
          {"plateau_tol", t.plateau_tol},
          {"plateau_min_iterations", t.plateau_min_iterations}};
}

// ─── Stream generation internals ─────────────────────────────────────────────

std::vector<Eigen::VectorXd> sample_goal_set(const DomainTheory& domain, int k,
                                             double min_separation, Rng& rng) {
  const GoalSpace& gs = domain.goal_space();
  std::vector<Eigen::VectorXd> goals;
  if (gs.kind == GoalSpace::Kind::DiscreteSet) {
    int n = static_cast<int>(gs.points.size());
    if (k > n)
      throw ConfigError("domain offers " + std::to_string(n) +
                        " candidate goals but the stream needs " + std::to_string(k));
    std::vector<int> idx(gs.points.size());
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i)
      std::swap(idx[i], idx[i + rng.uniform_int(n - i)]);
    for (int i = 0; i < k; ++i) goals.push_back(gs.points[idx[i]]);
    return goals;
  }
  for (int attempt = 0; attempt < 1000 * k && static_cast<int>(goals.size()) < k;
       ++attempt) {
    Eigen::VectorXd g = gs.sample(rng);
    bool separated = true;
    for (const auto& other : goals)
      if ((g - other).norm() < min_separation) {
        separated = false;
        break;
      }
    if (separated) goals.push_back(std::move(g));
  }
  if (static_cast<int>(goals.size()) < k)
    throw ConfigError("could not sample " + std::to_string(k) +
                      " goals separated by " + format_double(min_separation));
  return goals;
}

ProblemRecord make_record(const GRProblem& p, const RecognitionResult& res,
                          int train_iterations) {
  ProblemRecord r;
  r.problem_index = p.index;
  r.observability = p.observation.observability;
  r.noise = p.observation.noise_level;
  r.goal_count = p.goal_count();
  r.true_goal = p.true_goal;
  r.chosen = res.chosen;
  r.scores = res.scores;
  r.correct = res.chosen == p.true_goal;
  r.train_iterations = train_iterations;
  return r;
}

// Folds per-problem records into the report, keeping curves/timings intact.
void finalize_report(MetricsReport& report, const std::vector<ProblemRecord>& records) {
  MetricsReport computed = compute_metrics(records);
  report.records = computed.records;
  report.cells = computed.cells;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string sanitize_key(const std::string& key) {
  std::string out = key;
  for (char& c : out) {
    if (c == ':') c = '_';
    if (c == ',') c = '-';
  }
  return out;
}

}  // namespace

// ─── Mode names and config plumbing ──────────────────────────────────────────

RunMode run_mode_from_name(const std::string& name) {
  if (name == "gc") return RunMode::GC;
  if (name == "meta") return RunMode::Meta;
  if (name == "draco") return RunMode::Draco;
  if (name == "graql") return RunMode::Graql;
  throw ConfigError("unknown mode \"" + name + "\" (expected gc|meta|draco|graql)");
}

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::GC: return "gc";
    case RunMode::Meta: return "meta";
    case RunMode::Draco: return "draco";
    case RunMode::Graql: return "graql";
  }
  throw ConfigError("unknown run mode");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.observabilities.empty())
    throw ConfigError("at least one observability level is required");
  for (double o : cfg.observabilities)
    if (!(o > 0.0 && o <= 1.0))
      throw ConfigError("observability levels must lie in (0, 1]");
  if (cfg.noise_levels.empty())
    throw ConfigError("at least one noise level is required");
  for (double nl : cfg.noise_levels)
    if (!(nl >= 0.0 && nl <= 1.0))
      throw ConfigError("noise levels must lie in [0, 1]");
  if (cfg.goal_counts.empty())
    throw ConfigError("at least one goal-count setting is required");
  int min_goals = cfg.allow_single_goal ? 1 : 2;
  for (int k : cfg.goal_counts)
    if (k < min_goals)
      throw ConfigError("evaluation problems need at least two candidate goals");
  if (cfg.problems < 1) throw ConfigError("problems per cell must be positive");
  if (cfg.min_goal_separation < 0.0)
    throw ConfigError("goal separation must be non-negative");

  if (cfg.expert.iterations < 1 || cfg.expert.eval_rollouts < 1 ||
      cfg.expert.max_restarts < 0)
    throw ConfigError("expert budgets must be positive");
  if (!(cfg.expert.min_success >= 0.0 && cfg.expert.min_success <= 1.0))
    throw ConfigError("expert min_success must lie in [0, 1]");

  if (cfg.fewshot_iterations < 1)
    throw ConfigError("few-shot budget must be positive");
  if (cfg.probe_rollouts < 1) throw ConfigError("probe rollouts must be positive");
  if (!(cfg.probe_threshold >= 0.0 && cfg.probe_threshold <= 1.0))
    throw ConfigError("probe threshold must lie in [0, 1]");

  if (cfg.recognition.epsilon < 0.0)
    throw ConfigError("recognition epsilon must be non-negative");
  if (cfg.recognition.n_samples < 0)
    throw ConfigError("recognition n_samples must be non-negative");
  if (cfg.recognition.tie_tolerance < 0.0)
    throw ConfigError("tie tolerance must be non-negative");
  if (cfg.recognition.logit_scale <= 0.0 || cfg.recognition.sigma_scale <= 0.0)
    throw ConfigError("scoring scales must be positive");

  if (cfg.qlearn.episodes < 1 || cfg.qlearn.temperature <= 0.0 ||
      !(cfg.qlearn.alpha > 0.0 && cfg.qlearn.alpha <= 1.0) ||
      !(cfg.qlearn.gamma > 0.0 && cfg.qlearn.gamma <= 1.0) ||
      !(cfg.qlearn.eps_start >= 0.0 && cfg.qlearn.eps_start <= 1.0) ||
      !(cfg.qlearn.eps_end >= 0.0 && cfg.qlearn.eps_end <= 1.0))
    throw ConfigError("bad tabular Q-learning settings");

  if (cfg.mode == RunMode::Graql &&
      cfg.family.family != DomainDistribution::Family::Grid)
    throw ConfigError("the tabular recognizer needs a discrete environment family");
  if (cfg.mode == RunMode::GC && !cfg.fixed_domain)
    throw ConfigError("goal-conditioned runs assume one domain per stream; "
                      "set fixed_domain");

  cfg.train.validate();
}

ExperimentConfig experiment_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"name", "family", "mode", "observabilities", "noise_levels",
              "goal_counts", "problems", "fixed_domain", "allow_single_goal",
              "min_goal_separation", "seed", "mask_mode", "metric",
              "recognition", "train", "qlearn", "expert", "fewshot_iterations",
              "probe_enabled", "probe_rollouts", "probe_threshold", "out",
              "emit_curves"},
             "config");

  ExperimentConfig cfg;
  cfg.name = get_or<std::string>(j, "name", cfg.name);
  if (j.contains("family")) cfg.family = family_from_json(j["family"]);
  cfg.mode = run_mode_from_name(get_or<std::string>(j, "mode", "meta"));
  cfg.observabilities =
      get_or(j, "observabilities", cfg.observabilities);
  cfg.noise_levels = get_or(j, "noise_levels", cfg.noise_levels);
  cfg.goal_counts = get_or(j, "goal_counts", cfg.goal_counts);
  cfg.problems = get_or(j, "problems", cfg.problems);
  cfg.fixed_domain = get_or(j, "fixed_domain", cfg.fixed_domain);
  cfg.allow_single_goal = get_or(j, "allow_single_goal", cfg.allow_single_goal);
  cfg.min_goal_separation = get_or(j, "min_goal_separation", cfg.min_goal_separation);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);

  std::string mm = get_or<std::string>(j, "mask_mode", "uniform");
  if (mm == "uniform") cfg.mask_mode = MaskMode::UniformSubsample;
  else if (mm == "prefix") cfg.mask_mode = MaskMode::Prefix;
  else throw ConfigError("mask_mode must be \"uniform\" or \"prefix\"");

  std::string metric = get_or<std::string>(j, "metric", "kl");
  if (metric == "kl") cfg.metric = Metric::KL;
  else if (metric == "wasserstein") cfg.metric = Metric::Wasserstein;
  else throw ConfigError("metric must be \"kl\" or \"wasserstein\"");

  if (j.contains("recognition")) {
    const json& r = j["recognition"];
    check_keys(r, {"epsilon", "full_kl", "n_samples", "tie_tolerance",
                   "logit_scale", "sigma_scale"},
               "recognition");
    cfg.recognition.epsilon = get_or(r, "epsilon", cfg.recognition.epsilon);
    cfg.recognition.full_kl = get_or(r, "full_kl", cfg.recognition.full_kl);
    cfg.recognition.n_samples = get_or(r, "n_samples", cfg.recognition.n_samples);
    cfg.recognition.tie_tolerance =
        get_or(r, "tie_tolerance", cfg.recognition.tie_tolerance);
    cfg.recognition.logit_scale = get_or(r, "logit_scale", cfg.recognition.logit_scale);
    cfg.recognition.sigma_scale = get_or(r, "sigma_scale", cfg.recognition.sigma_scale);
  }
  if (j.contains("train")) train_from_json(j["train"], cfg.train);
  if (j.contains("qlearn")) {
    const json& q = j["qlearn"];
    check_keys(q, {"episodes", "alpha", "gamma", "eps_start", "eps_end",
                   "temperature"},
               "qlearn");
    cfg.qlearn.episodes = get_or(q, "episodes", cfg.qlearn.episodes);
    cfg.qlearn.alpha = get_or(q, "alpha", cfg.qlearn.alpha);
    cfg.qlearn.gamma = get_or(q, "gamma", cfg.qlearn.gamma);
    cfg.qlearn.eps_start = get_or(q, "eps_start", cfg.qlearn.eps_start);
    cfg.qlearn.eps_end = get_or(q, "eps_end", cfg.qlearn.eps_end);
    cfg.qlearn.temperature = get_or(q, "temperature", cfg.qlearn.temperature);
  }
  if (j.contains("expert")) {
    const json& e = j["expert"];
    check_keys(e, {"iterations", "min_success", "eval_rollouts", "max_restarts"},
               "expert");
    cfg.expert.iterations = get_or(e, "iterations", cfg.expert.iterations);
    cfg.expert.min_success = get_or(e, "min_success", cfg.expert.min_success);
    cfg.expert.eval_rollouts = get_or(e, "eval_rollouts", cfg.expert.eval_rollouts);
    cfg.expert.max_restarts = get_or(e, "max_restarts", cfg.expert.max_restarts);
  }
  cfg.fewshot_iterations = get_or(j, "fewshot_iterations", cfg.fewshot_iterations);
  cfg.probe_enabled = get_or(j, "probe_enabled", cfg.probe_enabled);
  cfg.probe_rollouts = get_or(j, "probe_rollouts", cfg.probe_rollouts);
  cfg.probe_threshold = get_or(j, "probe_threshold", cfg.probe_threshold);
  cfg.out_dir = get_or<std::string>(j, "out", cfg.out_dir);
  cfg.emit_curves = get_or(j, "emit_curves", cfg.emit_curves);

  validate(cfg);
  return cfg;
}

std::string experiment_to_json_text(const ExperimentConfig& cfg, int indent) {
  json j;
  j["name"] = cfg.name;
  j["family"] = family_to_json(cfg.family);
  j["mode"] = run_mode_name(cfg.mode);
  j["observabilities"] = cfg.observabilities;
  j["noise_levels"] = cfg.noise_levels;
  j["goal_counts"] = cfg.goal_counts;
  j["problems"] = cfg.problems;
  j["fixed_domain"] = cfg.fixed_domain;
  j["allow_single_goal"] = cfg.allow_single_goal;
  j["min_goal_separation"] = cfg.min_goal_separation;
  j["seed"] = cfg.seed;
  j["mask_mode"] = cfg.mask_mode == MaskMode::Prefix ? "prefix" : "uniform";
  j["metric"] = cfg.metric == Metric::Wasserstein ? "wasserstein" : "kl";
  j["recognition"] = {{"epsilon", cfg.recognition.epsilon},
                      {"full_kl", cfg.recognition.full_kl},
                      {"n_samples", cfg.recognition.n_samples},
                      {"tie_tolerance", cfg.recognition.tie_tolerance},
                      {"logit_scale", cfg.recognition.logit_scale},
                      {"sigma_scale", cfg.recognition.sigma_scale}};
  j["train"] = train_to_json(cfg.train);
  j["qlearn"] = {{"episodes", cfg.qlearn.episodes},
                 {"alpha", cfg.qlearn.alpha},
                 {"gamma", cfg.qlearn.gamma},
                 {"eps_start", cfg.qlearn.eps_start},
                 {"eps_end", cfg.qlearn.eps_end},
                 {"temperature", cfg.qlearn.temperature}};
  j["expert"] = {{"iterations", cfg.expert.iterations},
                 {"min_success", cfg.expert.min_success},
                 {"eval_rollouts", cfg.expert.eval_rollouts},
                 {"max_restarts", cfg.expert.max_restarts}};
  j["fewshot_iterations"] = cfg.fewshot_iterations;
  j["probe_enabled"] = cfg.probe_enabled;
  j["probe_rollouts"] = cfg.probe_rollouts;
  j["probe_threshold"] = cfg.probe_threshold;
  j["out"] = cfg.out_dir;
  j["emit_curves"] = cfg.emit_curves;
  return j.dump(indent) + "\n";
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_from_json_text(read_text_file(path));
}

AuraConfig make_aura_config(const ExperimentConfig& cfg) {
  AuraConfig ac;
  ac.mode = cfg.mode == RunMode::GC ? AuraMode::GC : AuraMode::Meta;
  ac.train = cfg.train;
  ac.train.seed = derive_seed(cfg.seed, {0xa17a0});
  ac.fewshot_iterations = cfg.fewshot_iterations;
  ac.probe_enabled = cfg.probe_enabled;
  ac.probe_rollouts = cfg.probe_rollouts;
  ac.probe_threshold = cfg.probe_threshold;
  ac.probe_seed = derive_seed(cfg.seed, {0x9a0be});
  ac.recognition = cfg.recognition;
  ac.recognition.metric = cfg.metric;
  ac.recognition.seed = derive_seed(cfg.seed, {0x1f0});
  return ac;
}

GDGRStream recognizer_view(const EvalStream& stream) {
  GDGRStream view;
  view.reserve(stream.size());
  for (const GRProblem& p : stream)
    view.push_back({p.domain, p.dynamic_goals, p.observation});
  return view;
}

// ─── Reference experts ───────────────────────────────────────────────────────

std::string expert_key(const DomainTheory& domain, const Eigen::VectorXd& goal,
                       bool tabular) {
  return std::string(tabular ? "tab:" : "pg:") + std::to_string(domain.domain_id()) +
         ":" + canonical_goal_key(goal);
}

const CachedPolicy& reference_expert(const DomainTheory& domain,
                                     const Eigen::VectorXd& goal,
                                     const ExperimentConfig& cfg, bool tabular,
                                     TrainingCache& cache) {
  std::string key = expert_key(domain, goal, tabular);
  auto it = cache.entries.find(key);
  if (it != cache.entries.end()) return it->second;

  double best_rate = 0.0;
  for (int attempt = 0; attempt <= cfg.expert.max_restarts; ++attempt) {
    std::uint64_t seed = derive_seed(
        cfg.seed, {0xe4be47, domain.domain_id(), hash_vector(goal),
                   static_cast<std::uint64_t>(attempt)});
    TrainResult res;
    if (tabular) {
      QLearnConfig qc = cfg.qlearn;
      qc.seed = seed;
      res = q_learn(domain, goal, qc);
    } else {
      TrainConfig tc = cfg.train;
      tc.iterations = cfg.expert.iterations;
      tc.seed = seed;
      res = pg_train(domain, goal, tc);
    }
    double rate = success_rate(domain, res.policy, goal,
                               derive_seed(seed, {0xe7a1}), cfg.expert.eval_rollouts);
    best_rate = std::max(best_rate, rate);
    if (rate >= cfg.expert.min_success) {
      auto [pos, inserted] =
          cache.entries.emplace(std::move(key),
                                CachedPolicy{std::move(res.policy), res.iterations});
      (void)inserted;
      return pos->second;
    }
  }
  throw TrainingError("reference policy for goal " + canonical_goal_key(goal) +
                      " only reached success rate " + format_double(best_rate) +
                      " (needs " + format_double(cfg.expert.min_success) + ")");
}

// ─── Stream generation ───────────────────────────────────────────────────────

EvalStream generate_stream(const ExperimentConfig& cfg, std::uint64_t rng_seed,
                           TrainingCache& cache) {
  validate(cfg);
  EvalStream stream;
  DomainPtr shared;
  if (cfg.fixed_domain)
    shared = sample_domain(cfg.family, derive_seed(rng_seed, {0xd03a11}));

  bool tabular = cfg.mode == RunMode::Graql;
  int index = 0;
  for (double obs : cfg.observabilities)
    for (double noise : cfg.noise_levels)
      for (int k : cfg.goal_counts)
        for (int p = 0; p < cfg.problems; ++p, ++index) {
          GRProblem prob;
          prob.index = index;
          prob.domain =
              cfg.fixed_domain
                  ? shared
                  : sample_domain(cfg.family,
                                  derive_seed(rng_seed, {0xd03a11,
                                                         static_cast<std::uint64_t>(index)}));

          Rng rng(derive_seed(rng_seed, {0x96a15, static_cast<std::uint64_t>(index)}));
          prob.dynamic_goals =
              sample_goal_set(*prob.domain, k, cfg.min_goal_separation, rng);
          prob.true_goal = k == 1 ? 0 : rng.uniform_int(k);

          const CachedPolicy& expert = reference_expert(
              *prob.domain, prob.dynamic_goals[prob.true_goal], cfg, tabular, cache);
          RolloutOptions opts;
          opts.noise_level = noise;
          opts.greedy = true;
          Trajectory traj = rollout(*prob.domain, expert.policy,
                                    prob.dynamic_goals[prob.true_goal],
                                    derive_seed(rng_seed, {0xe4b, static_cast<std::uint64_t>(index)}),
                                    opts);
          prob.observation = mask(traj, obs, cfg.mask_mode,
                                  derive_seed(rng_seed, {0x0b5e, static_cast<std::uint64_t>(index)}));
          prob.observation.noise_level = noise;
          stream.push_back(std::move(prob));
        }
  return stream;
}

// ─── Runners ─────────────────────────────────────────────────────────────────

MetricsReport run_draco_baseline(const EvalStream& stream, const ExperimentConfig& cfg) {
  MetricsReport report;
  report.method = "draco";
  if (stream.empty()) return report;

  std::vector<ProblemRecord> records;
  for (const GRProblem& p : stream) {
    auto t_adapt = Clock::now();
    std::vector<StochasticPolicy> candidates;
    int iters = 0;
    for (std::size_t g = 0; g < p.dynamic_goals.size(); ++g) {
      TrainConfig tc = cfg.train;
      tc.seed = derive_seed(cfg.seed, {0xd4ac0, static_cast<std::uint64_t>(p.index), g});
      TrainResult res = pg_train(*p.domain, p.dynamic_goals[g], tc);
      iters += res.iterations;
      if (cfg.emit_curves)
        report.curves.emplace_back(
            "p" + std::to_string(p.index) + "_g" + std::to_string(g),
            std::move(res.curve));
      candidates.push_back(std::move(res.policy));
    }
    report.seconds.adaptation += elapsed_s(t_adapt);

    RecognitionParams rp = cfg.recognition;
    rp.metric = cfg.metric;
    rp.seed = derive_seed(cfg.seed, {0x1f0, static_cast<std::uint64_t>(p.index)});
    auto t_inf = Clock::now();
    RecognitionResult res = infer_goal(candidates, p.dynamic_goals, p.observation, rp);
    report.seconds.inference += elapsed_s(t_inf);

    records.push_back(make_record(p, res, iters));
    report.adaptation_iterations += iters;
  }
  report.total_training_iterations = report.adaptation_iterations;
  finalize_report(report, records);
  return report;
}

MetricsReport run_graql_baseline(const EvalStream& stream, const ExperimentConfig& cfg) {
  MetricsReport report;
  report.method = "graql";
  if (stream.empty()) return report;
  for (const GRProblem& p : stream)
    if (p.domain->discrete_state_count() <= 0)
      throw ConfigError("the tabular recognizer cannot handle continuous domains");

  std::vector<ProblemRecord> records;
  for (const GRProblem& p : stream) {
    auto t_adapt = Clock::now();
    std::vector<StochasticPolicy> candidates;
    int iters = 0;
    for (std::size_t g = 0; g < p.dynamic_goals.size(); ++g) {
      QLearnConfig qc = cfg.qlearn;
      qc.seed = derive_seed(cfg.seed, {0x64a1, static_cast<std::uint64_t>(p.index), g});
      TrainResult res = q_learn(*p.domain, p.dynamic_goals[g], qc);
      iters += res.iterations;
      candidates.push_back(std::move(res.policy));
    }
    report.seconds.adaptation += elapsed_s(t_adapt);

    RecognitionParams rp = cfg.recognition;
    rp.metric = Metric::KL;  // tabular policies expose action distributions
    rp.seed = derive_seed(cfg.seed, {0x1f0, static_cast<std::uint64_t>(p.index)});
    auto t_inf = Clock::now();
    RecognitionResult res = infer_goal(candidates, p.dynamic_goals, p.observation, rp);
    report.seconds.inference += elapsed_s(t_inf);

    records.push_back(make_record(p, res, iters));
    report.adaptation_iterations += iters;
  }
  report.total_training_iterations = report.adaptation_iterations;
  finalize_report(report, records);
  return report;
}

MetricsReport run_aura(const EvalStream& stream, AuraMode mode,
                       const ExperimentConfig& cfg) {
  AuraConfig ac = make_aura_config(cfg);
  ac.mode = mode;
  auto t0 = Clock::now();
  Memory memory = init_memory(cfg.family, ac);
  double init_s = elapsed_s(t0);
  MetricsReport report = run_aura(stream, memory, cfg);
  report.seconds.init = init_s;
  return report;
}

MetricsReport run_aura(const EvalStream& stream, Memory& memory,
                       const ExperimentConfig& cfg) {
  MetricsReport report;
  report.method = memory.mode == AuraMode::GC ? "gc" : "meta";
  report.init_iterations = memory.init_iterations;
  if (stream.empty()) return report;

  AuraConfig ac = make_aura_config(cfg);
  ac.mode = memory.mode;

  std::size_t h0 = memory.history.size();
  GDGRStream view = recognizer_view(stream);
  auto t_solve = Clock::now();
  std::vector<RecognitionResult> results = solve_stream(view, memory, ac);
  double solve_s = elapsed_s(t_solve);

  std::vector<ProblemRecord> records;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const HistoryEntry& h = memory.history[h0 + i];
    records.push_back(make_record(stream[i], results[i], h.adaptation_iterations));
    report.adaptation_iterations += h.adaptation_iterations;
  }

  // Recognition is a pure function of cached policies, so re-timing it on the
  // recall path attributes inference cost without changing any outcome.
  double inf_s = 0.0;
  for (const GRProblem& p : stream) {
    DomainMemory& dm = memory.domain_entries.at(p.domain->domain_id());
    std::vector<StochasticPolicy> policies =
        goals_adaptation(p.dynamic_goals, *p.domain, dm, memory, ac);
    auto t_inf = Clock::now();
    recognition_inference(policies, p.dynamic_goals, p.observation, ac.recognition);
    inf_s += elapsed_s(t_inf);
  }
  report.seconds.inference = inf_s;
  report.seconds.adaptation = std::max(0.0, solve_s - inf_s);

  report.init_iterations = memory.init_iterations;
  report.domain_iterations = memory.domain_iterations;
  report.total_training_iterations = report.init_iterations +
                                     report.domain_iterations +
                                     report.adaptation_iterations;
  if (cfg.emit_curves && !memory.init_curve.empty())
    report.curves.emplace_back("init", memory.init_curve);
  finalize_report(report, records);
  return report;
}

// ─── Outputs ─────────────────────────────────────────────────────────────────

void emit_outputs(const MetricsReport& report, const ExperimentConfig& cfg,
                  const TrainingCache& cache, const std::string& dir) {
  if (report.records.empty())
    throw ConfigError("refusing to write outputs for a run without records");
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "policies", ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());

  std::string metrics_csv =
      "method,observability,noise,goal_count,problems,accuracy,accuracy_std,"
      "precision,precision_std,recall,recall_std,f_score,f_score_std,"
      "train_iterations\n";
  for (const CellAggregate& c : report.cells) {
    metrics_csv += report.method;
    metrics_csv += ',';
    metrics_csv += format_double(c.observability);
    metrics_csv += ',';
    metrics_csv += format_double(c.noise);
    metrics_csv += ',';
    metrics_csv += std::to_string(c.goal_count);
    metrics_csv += ',';
    metrics_csv += std::to_string(c.problems);
    metrics_csv += ',';
    metrics_csv += format_double(c.accuracy);
    metrics_csv += ',';
    metrics_csv += format_double(c.accuracy_std);
    metrics_csv += ',';
    metrics_csv += format_double(c.precision);
    metrics_csv += ',';
    metrics_csv += format_double(c.precision_std);
    metrics_csv += ',';
    metrics_csv += format_double(c.recall);
    metrics_csv += ',';
    metrics_csv += format_double(c.recall_std);
    metrics_csv += ',';
    metrics_csv += format_double(c.f_score);
    metrics_csv += ',';
    metrics_csv += format_double(c.f_score_std);
    metrics_csv += ',';
    metrics_csv += std::to_string(c.train_iterations);
    metrics_csv += '\n';
  }

  std::string records_csv =
      "problem_index,observability,noise,goal_count,true_goal,chosen,correct,"
      "train_iterations,scores\n";
  for (const ProblemRecord& r : report.records) {
    records_csv += std::to_string(r.problem_index);
    records_csv += ',';
    records_csv += format_double(r.observability);
    records_csv += ',';
    records_csv += format_double(r.noise);
    records_csv += ',';
    records_csv += std::to_string(r.goal_count);
    records_csv += ',';
    records_csv += std::to_string(r.true_goal);
    records_csv += ',';
    records_csv += std::to_string(r.chosen);
    records_csv += ',';
    records_csv += r.correct ? '1' : '0';
    records_csv += ',';
    records_csv += std::to_string(r.train_iterations);
    records_csv += ',';
    for (std::size_t i = 0; i < r.scores.size(); ++i) {
      if (i > 0) records_csv += ';';
      records_csv += format_double(r.scores[i]);
    }
    records_csv += '\n';
  }

  std::string curves_csv = "curve,iteration,mean_return,std_return\n";
  for (const auto& [label, curve] : report.curves)
    for (const IterationStat& s : curve) {
      curves_csv += label;
      curves_csv += ',';
      curves_csv += std::to_string(s.iteration);
      curves_csv += ',';
      curves_csv += format_double(s.mean_return);
      curves_csv += ',';
      curves_csv += format_double(s.std_return);
      curves_csv += '\n';
    }

  write_text_file((fs::path(dir) / "metrics.csv").string(), metrics_csv);
  write_text_file((fs::path(dir) / "records.csv").string(), records_csv);
  write_text_file((fs::path(dir) / "learning_curves.csv").string(), curves_csv);

  json policy_hashes;
  for (const auto& [key, cached] : cache.entries) {
    std::string name = "policies/" + sanitize_key(key) + ".pol";
    save_policy(cached.policy, (fs::path(dir) / name).string());
    policy_hashes[name] =
        "fnv1a:" + hex64(fnv1a_str(policy_to_bytes(cached.policy)));
  }

  json manifest;
  manifest["format"] = "aura-run-v1";
  manifest["method"] = report.method;
  manifest["seed"] = cfg.seed;
  manifest["config"] = json::parse(experiment_to_json_text(cfg, -1));
  manifest["accounting"] = {
      {"init_iterations", report.init_iterations},
      {"domain_iterations", report.domain_iterations},
      {"adaptation_iterations", report.adaptation_iterations},
      {"total_training_iterations", report.total_training_iterations}};
  manifest["policies"] = std::move(policy_hashes);
  manifest["outputs"] = {
      {"metrics.csv", "fnv1a:" + hex64(fnv1a_str(metrics_csv))},
      {"records.csv", "fnv1a:" + hex64(fnv1a_str(records_csv))},
      {"learning_curves.csv", "fnv1a:" + hex64(fnv1a_str(curves_csv))}};
  manifest["timings_seconds"] = {{"init", report.seconds.init},
                                 {"adaptation", report.seconds.adaptation},
                                 {"inference", report.seconds.inference}};
  write_text_file((fs::path(dir) / "manifest.json").string(),
                  manifest.dump(2) + "\n");
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  TrainingCache cache;
  EvalStream stream = generate_stream(cfg, cfg.seed, cache);

  MetricsReport report;
  switch (cfg.mode) {
    case RunMode::Draco: report = run_draco_baseline(stream, cfg); break;
    case RunMode::Graql: report = run_graql_baseline(stream, cfg); break;
    case RunMode::GC: report = run_aura(stream, AuraMode::GC, cfg); break;
    case RunMode::Meta: report = run_aura(stream, AuraMode::Meta, cfg); break;
  }
  if (!cfg.out_dir.empty()) emit_outputs(report, cfg, cache, cfg.out_dir);
  return report;
}

}  // namespace aura
