#include "aura/aura/memory_io.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aura/core/csv.hpp"
#include "aura/core/errors.hpp"
#include "aura/core/trajectory_io.hpp"
#include "aura/learn/policy_io.hpp"

namespace aura {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kIndexName = "index.json";
constexpr const char* kHistoryName = "history.csv";
constexpr const char* kFormatTag = "aura-memory-v1";

const char* strategy_name(AdaptationStrategy s) {
  switch (s) {
    case AdaptationStrategy::ZeroShot: return "zero_shot";
    case AdaptationStrategy::FewShot: return "few_shot";
    case AdaptationStrategy::Recall: return "recall";
  }
  throw IoError("unknown adaptation strategy");
}

AdaptationStrategy strategy_from_name(const std::string& s) {
  if (s == "zero_shot") return AdaptationStrategy::ZeroShot;
  if (s == "few_shot") return AdaptationStrategy::FewShot;
  if (s == "recall") return AdaptationStrategy::Recall;
  throw IoError("unknown adaptation strategy: " + s);
}

std::string join_vector(const Eigen::VectorXd& v, char sep) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

Eigen::VectorXd split_vector(std::string_view text, char sep) {
  std::vector<double> vals;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    vals.push_back(parse_double(text.substr(start, end - start)));
    start = end + 1;
    if (end == text.size()) break;
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

std::string history_to_csv(const std::vector<HistoryEntry>& history) {
  std::string out =
      "problem_index,domain_id,metric,chosen,adaptation_iterations,"
      "domain_stamp,goals_stamp,inference_stamp,update_stamp,goals,scores\n";
  for (const auto& h : history) {
    out += std::to_string(h.problem_index);
    out += ',';
    out += std::to_string(h.domain_id);
    out += ',';
    out += std::to_string(static_cast<int>(h.metric));
    out += ',';
    out += std::to_string(h.chosen);
    out += ',';
    out += std::to_string(h.adaptation_iterations);
    out += ',';
    out += std::to_string(h.domain_stamp);
    out += ',';
    out += std::to_string(h.goals_stamp);
    out += ',';
    out += std::to_string(h.inference_stamp);
    out += ',';
    out += std::to_string(h.update_stamp);
    out += ',';
    for (std::size_t i = 0; i < h.dynamic_goals.size(); ++i) {
      if (i > 0) out += ';';
      out += join_vector(h.dynamic_goals[i], ':');
    }
    out += ',';
    for (std::size_t i = 0; i < h.scores.size(); ++i) {
      if (i > 0) out += ';';
      out += format_double(h.scores[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<HistoryEntry> history_from_csv(const std::string& text) {
  std::vector<HistoryEntry> history;
  auto lines = split_lines(text);
  for (std::size_t li = 1; li < lines.size(); ++li) {  // skip header
    if (lines[li].empty()) continue;
    auto f = split_csv_line(lines[li]);
    if (f.size() != 11) throw IoError("malformed history row");
    HistoryEntry h;
    h.problem_index = static_cast<int>(parse_int(f[0]));
    h.domain_id = parse_u64(f[1]);
    h.metric = static_cast<Metric>(parse_int(f[2]));
    h.chosen = static_cast<int>(parse_int(f[3]));
    h.adaptation_iterations = static_cast<int>(parse_int(f[4]));
    h.domain_stamp = static_cast<long>(parse_int(f[5]));
    h.goals_stamp = static_cast<long>(parse_int(f[6]));
    h.inference_stamp = static_cast<long>(parse_int(f[7]));
    h.update_stamp = static_cast<long>(parse_int(f[8]));
    std::string_view goals = f[9];
    std::size_t start = 0;
    while (!goals.empty() && start <= goals.size()) {
      std::size_t end = goals.find(';', start);
      if (end == std::string_view::npos) end = goals.size();
      h.dynamic_goals.push_back(split_vector(goals.substr(start, end - start), ':'));
      start = end + 1;
      if (end == goals.size()) break;
    }
    std::string_view scores = f[10];
    start = 0;
    while (!scores.empty() && start <= scores.size()) {
      std::size_t end = scores.find(';', start);
      if (end == std::string_view::npos) end = scores.size();
      h.scores.push_back(parse_double(scores.substr(start, end - start)));
      start = end + 1;
      if (end == scores.size()) break;
    }
    history.push_back(std::move(h));
  }
  return history;
}

}  // namespace

void save_memory(const Memory& memory, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create memory directory " + dir + ": " + ec.message());

  json index;
  index["format"] = kFormatTag;
  index["mode"] = memory.mode == AuraMode::GC ? "gc" : "meta";
  index["accounting"] = {{"init_iterations", memory.init_iterations},
                         {"domain_iterations", memory.domain_iterations},
                         {"goal_iterations", memory.goal_iterations},
                         {"phase_clock", memory.phase_clock}};

  if (memory.meta_policy) {
    save_policy(memory.meta_policy->policy, (fs::path(dir) / "meta.pol").string());
    index["meta"] = {{"file", "meta.pol"},
                     {"provenance", memory.meta_policy->provenance},
                     {"iterations", memory.meta_policy->iterations}};
  }

  json domains = json::array();
  int di = 0;
  for (const auto& [id, dm] : memory.domain_entries) {
    json jd;
    jd["id"] = id;
    if (dm.gc_policy) {
      std::string name = "d" + std::to_string(di) + "_gc.pol";
      save_policy(*dm.gc_policy, (fs::path(dir) / name).string());
      jd["gc"] = {{"file", name}, {"cost", dm.gc_cost}};
    }
    json goals = json::array();
    int gi = 0;
    for (const auto& [key, entry] : dm.goal_policies) {
      std::string name = "d" + std::to_string(di) + "_g" + std::to_string(gi) + ".pol";
      save_policy(entry.policy, (fs::path(dir) / name).string());
      goals.push_back({{"key", key},
                       {"file", name},
                       {"cost", entry.cost},
                       {"strategy", strategy_name(entry.strategy)}});
      ++gi;
    }
    jd["goals"] = std::move(goals);
    domains.push_back(std::move(jd));
    ++di;
  }
  index["domains"] = std::move(domains);

  write_text_file((fs::path(dir) / kIndexName).string(), index.dump(2) + "\n");
  write_text_file((fs::path(dir) / kHistoryName).string(),
                  history_to_csv(memory.history));
}

Memory load_memory(const std::string& dir) {
  json index;
  try {
    index = json::parse(read_text_file((fs::path(dir) / kIndexName).string()));
  } catch (const json::exception& e) {
    throw IoError(std::string("cannot parse memory index: ") + e.what());
  }
  if (index.value("format", "") != kFormatTag)
    throw IoError("unrecognized memory format in " + dir);

  Memory memory;
  memory.mode = index.at("mode").get<std::string>() == "gc" ? AuraMode::GC
                                                            : AuraMode::Meta;
  const json& acc = index.at("accounting");
  memory.init_iterations = acc.at("init_iterations").get<long>();
  memory.domain_iterations = acc.at("domain_iterations").get<long>();
  memory.goal_iterations = acc.at("goal_iterations").get<long>();
  memory.phase_clock = acc.at("phase_clock").get<long>();

  if (index.contains("meta")) {
    MetaPolicy mp;
    mp.policy = load_policy((fs::path(dir) / index["meta"].at("file").get<std::string>()).string());
    mp.provenance = index["meta"].value("provenance", "");
    mp.iterations = index["meta"].value("iterations", 0);
    memory.meta_policy = std::move(mp);
  }

  for (const auto& jd : index.at("domains")) {
    DomainMemory dm;
    std::uint64_t id = jd.at("id").get<std::uint64_t>();
    if (jd.contains("gc")) {
      dm.gc_policy =
          load_policy((fs::path(dir) / jd["gc"].at("file").get<std::string>()).string());
      dm.gc_cost = jd["gc"].value("cost", 0);
    }
    for (const auto& jg : jd.at("goals")) {
      GoalEntry entry;
      entry.policy =
          load_policy((fs::path(dir) / jg.at("file").get<std::string>()).string());
      entry.cost = jg.value("cost", 0);
      entry.strategy = strategy_from_name(jg.at("strategy").get<std::string>());
      dm.goal_policies.emplace(jg.at("key").get<std::string>(), std::move(entry));
    }
    memory.domain_entries.emplace(id, std::move(dm));
  }

  fs::path hist = fs::path(dir) / kHistoryName;
  if (fs::exists(hist)) memory.history = history_from_csv(read_text_file(hist.string()));
  return memory;
}

}  // namespace aura
