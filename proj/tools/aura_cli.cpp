// Command-line front end: training, stream generation, adaptation,
// single-problem recognition, full benchmark runs, and report re-aggregation.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aura/aura/memory_io.hpp"
#include "aura/bench/experiment.hpp"
#include "aura/core/csv.hpp"
#include "aura/core/errors.hpp"
#include "aura/core/trajectory_io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace aura;

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  std::string mode_name;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

ExperimentConfig load_config(const GlobalArgs& g) {
  if (g.config_path.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_experiment_config(g.config_path);
  if (g.seed_set) cfg.seed = g.seed;
  if (!g.mode_name.empty()) cfg.mode = run_mode_from_name(g.mode_name);
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  validate(cfg);
  return cfg;
}

std::vector<Eigen::VectorXd> parse_goal_list(const std::string& text) {
  std::vector<Eigen::VectorXd> goals;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string::npos) end = text.size();
    std::string_view part(text.data() + start, end - start);
    if (!part.empty()) {
      auto fields = split_csv_line(part);
      Eigen::VectorXd g(static_cast<Eigen::Index>(fields.size()));
      for (std::size_t i = 0; i < fields.size(); ++i)
        g[static_cast<Eigen::Index>(i)] = parse_double(fields[i]);
      goals.push_back(std::move(g));
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  if (goals.empty()) throw ConfigError("no goals given (format: \"x,y;x,y\")");
  return goals;
}

void print_report(const MetricsReport& report) {
  for (const auto& c : report.cells)
    std::printf("obs=%s noise=%s goals=%d n=%d acc=%.4f prec=%.4f rec=%.4f f=%.4f\n",
                format_double(c.observability).c_str(),
                format_double(c.noise).c_str(), c.goal_count, c.problems,
                c.accuracy, c.precision, c.recall, c.f_score);
  std::printf("iterations: init=%ld domain=%ld adaptation=%ld total=%ld\n",
              report.init_iterations, report.domain_iterations,
              report.adaptation_iterations, report.total_training_iterations);
}

int cmd_train_meta(const GlobalArgs& g) {
  ExperimentConfig cfg = load_config(g);
  if (g.out_dir.empty()) throw ConfigError("--out <memory dir> is required");
  AuraConfig ac = make_aura_config(cfg);
  ac.mode = AuraMode::Meta;
  Memory memory = init_memory(cfg.family, ac);
  save_memory(memory, g.out_dir);
  std::printf("meta-policy trained for %ld iterations; memory saved to %s\n",
              memory.init_iterations, g.out_dir.c_str());
  return 0;
}

int cmd_train_gc(const GlobalArgs& g) {
  ExperimentConfig cfg = load_config(g);
  if (g.out_dir.empty()) throw ConfigError("--out <memory dir> is required");
  AuraConfig ac = make_aura_config(cfg);
  ac.mode = AuraMode::GC;
  Memory memory = init_memory(cfg.family, ac);
  DomainPtr domain = sample_domain(cfg.family, derive_seed(cfg.seed, {0xd03a11}));
  domain_adaptation(*domain, memory, ac);
  save_memory(memory, g.out_dir);
  std::printf("goal-conditioned policy trained for %ld iterations on domain %llu; "
              "memory saved to %s\n",
              memory.domain_iterations,
              static_cast<unsigned long long>(domain->domain_id()),
              g.out_dir.c_str());
  return 0;
}

int cmd_gen_stream(const GlobalArgs& g) {
  ExperimentConfig cfg = load_config(g);
  if (g.out_dir.empty()) throw ConfigError("--out <dir> is required");
  TrainingCache cache;
  EvalStream stream = generate_stream(cfg, cfg.seed, cache);

  std::error_code ec;
  fs::create_directories(g.out_dir, ec);
  if (ec) throw IoError("cannot create " + g.out_dir + ": " + ec.message());

  nlohmann::json js = nlohmann::json::array();
  for (const GRProblem& p : stream) {
    std::string obs_name = "obs_" + std::to_string(p.index) + ".csv";
    save_observation_csv(p.observation, (fs::path(g.out_dir) / obs_name).string());
    nlohmann::json jp;
    jp["index"] = p.index;
    jp["domain"] = nlohmann::json::parse(p.domain->spec_text());
    nlohmann::json goals = nlohmann::json::array();
    for (const auto& goal : p.dynamic_goals) {
      nlohmann::json jg = nlohmann::json::array();
      for (Eigen::Index i = 0; i < goal.size(); ++i) jg.push_back(goal[i]);
      goals.push_back(std::move(jg));
    }
    jp["goals"] = std::move(goals);
    jp["true_goal"] = p.true_goal;
    jp["observation_file"] = obs_name;
    js.push_back(std::move(jp));
  }
  write_text_file((fs::path(g.out_dir) / "stream.json").string(), js.dump(2) + "\n");
  std::printf("wrote %zu problems to %s\n", stream.size(), g.out_dir.c_str());
  return 0;
}

int cmd_adapt(const GlobalArgs& g, const std::string& memory_dir) {
  ExperimentConfig cfg = load_config(g);
  Memory memory;
  if (!memory_dir.empty() && fs::exists(fs::path(memory_dir) / "index.json")) {
    memory = load_memory(memory_dir);
  } else {
    AuraConfig ac = make_aura_config(cfg);
    memory = init_memory(cfg.family, ac);
  }

  TrainingCache cache;
  EvalStream stream = generate_stream(cfg, cfg.seed, cache);
  MetricsReport report = run_aura(stream, memory, cfg);

  if (!memory_dir.empty()) save_memory(memory, memory_dir);
  if (!cfg.out_dir.empty()) emit_outputs(report, cfg, cache, cfg.out_dir);
  print_report(report);
  return 0;
}

int cmd_recognize(const GlobalArgs& g, const std::string& memory_dir,
                  const std::string& obs_path, const std::string& goals_text) {
  ExperimentConfig cfg = load_config(g);
  if (obs_path.empty()) throw ConfigError("--obs <observation csv> is required");
  if (memory_dir.empty()) throw ConfigError("--memory <dir> is required");

  Memory memory;
  if (fs::exists(fs::path(memory_dir) / "index.json")) {
    memory = load_memory(memory_dir);
  } else {
    AuraConfig init_cfg = make_aura_config(cfg);
    memory = init_memory(cfg.family, init_cfg);
  }
  AuraConfig ac = make_aura_config(cfg);
  ac.mode = memory.mode;

  DomainPtr domain = sample_domain(cfg.family, derive_seed(cfg.seed, {0xd03a11}));
  std::vector<Eigen::VectorXd> goals;
  if (!goals_text.empty()) {
    goals = parse_goal_list(goals_text);
  } else if (domain->goal_space().kind == GoalSpace::Kind::DiscreteSet) {
    goals = domain->goal_space().points;
  } else {
    throw ConfigError("continuous goal space: pass --goals \"x,y,z;x,y,z\"");
  }

  ObservationSequence obs = load_observation_csv(obs_path);

  DomainMemory& dm = domain_adaptation(*domain, memory, ac);
  long before = memory.goal_iterations;
  std::vector<StochasticPolicy> policies =
      goals_adaptation(goals, *domain, dm, memory, ac);
  RecognitionResult res =
      recognition_inference(policies, goals, obs, ac.recognition);
  update_memory(memory, static_cast<int>(memory.history.size()),
                domain->domain_id(), goals, res,
                static_cast<int>(memory.goal_iterations - before), 0, 0, 0);
  save_memory(memory, memory_dir);

  std::printf("chosen,%d,%s\n", res.chosen,
              canonical_goal_key(goals[static_cast<std::size_t>(res.chosen)]).c_str());
  for (std::size_t i = 0; i < goals.size(); ++i)
    std::printf("score,%s,%s\n", canonical_goal_key(goals[i]).c_str(),
                format_double(res.scores[i]).c_str());
  return 0;
}

int cmd_bench(const GlobalArgs& g) {
  ExperimentConfig cfg = load_config(g);
  MetricsReport report = run_experiment(cfg);
  print_report(report);
  if (!cfg.out_dir.empty())
    std::printf("outputs written to %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_report(const std::string& dir) {
  std::string path = (fs::path(dir) / "records.csv").string();
  std::string text = read_text_file(path);
  auto lines = split_lines(text);
  std::vector<ProblemRecord> records;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    auto f = split_csv_line(lines[li]);
    if (f.size() != 9) throw IoError("malformed row in " + path);
    ProblemRecord r;
    r.problem_index = static_cast<int>(parse_int(f[0]));
    r.observability = parse_double(f[1]);
    r.noise = parse_double(f[2]);
    r.goal_count = static_cast<int>(parse_int(f[3]));
    r.true_goal = static_cast<int>(parse_int(f[4]));
    r.chosen = static_cast<int>(parse_int(f[5]));
    r.correct = parse_int(f[6]) != 0;
    r.train_iterations = static_cast<int>(parse_int(f[7]));
    records.push_back(std::move(r));
  }
  MetricsReport report = compute_metrics(records);
  fs::path manifest_path = fs::path(dir) / "manifest.json";
  if (fs::exists(manifest_path)) {
    auto manifest = nlohmann::json::parse(read_text_file(manifest_path.string()));
    report.method = manifest.value("method", "unknown");
  } else {
    report.method = "unknown";
  }
  print_report(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal-recognition engine and benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--config", g.config_path, "experiment config (JSON)");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--mode", g.mode_name, "gc|meta|draco|graql")
      ->check(CLI::IsMember({"gc", "meta", "draco", "graql"}));
  auto* seed_opt = app.add_option("--seed", g.seed, "master seed override");

  app.add_subcommand("train-meta", "meta-train an initialization and save the memory");
  app.add_subcommand("train-gc", "train a goal-conditioned policy and save the memory");
  app.add_subcommand("gen-stream", "generate a problem stream with observations");

  std::string memory_dir;
  auto* adapt = app.add_subcommand("adapt", "run the recognizer over a stream, reusing a memory directory");
  adapt->add_option("--memory", memory_dir, "memory directory to load/update");

  std::string obs_path, goals_text;
  auto* recog = app.add_subcommand("recognize", "infer the goal behind one observation file");
  recog->add_option("--memory", memory_dir, "memory directory to load/update");
  recog->add_option("--obs", obs_path, "observation CSV");
  recog->add_option("--goals", goals_text, "candidate goals, \"x,y;x,y\"");

  app.add_subcommand("bench", "generate a stream and run the configured method");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "re-aggregate metrics from records.csv");
  report->add_option("dir", report_dir, "run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  g.seed_set = seed_opt->count() > 0;
  try {
    if (app.got_subcommand("train-meta")) return cmd_train_meta(g);
    if (app.got_subcommand("train-gc")) return cmd_train_gc(g);
    if (app.got_subcommand("gen-stream")) return cmd_gen_stream(g);
    if (app.got_subcommand("adapt")) return cmd_adapt(g, memory_dir);
    if (app.got_subcommand("recognize"))
      return cmd_recognize(g, memory_dir, obs_path, goals_text);
    if (app.got_subcommand("bench")) return cmd_bench(g);
    if (app.got_subcommand("report")) return cmd_report(report_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 2;
  } catch (const TrainingError& e) {
    std::fprintf(stderr, "training error: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
