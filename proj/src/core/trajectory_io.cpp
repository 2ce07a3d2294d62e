#include "aura/core/trajectory_io.hpp"

#include <fstream>
#include <sstream>

#include "aura/core/csv.hpp"

namespace aura {

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out;
  out += "step_index";
  if (!traj.steps.empty()) {
    const auto& first = traj.steps.front();
    for (Eigen::Index i = 0; i < first.state.size(); ++i)
      out += ",state_" + std::to_string(i);
    for (Eigen::Index i = 0; i < first.action.size(); ++i)
      out += ",action_" + std::to_string(i);
  }
  out += ",reward,terminal\n";

  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const auto& s = traj.steps[t];
    out += std::to_string(t);
    for (Eigen::Index i = 0; i < s.state.size(); ++i)
      out += "," + format_double(s.state[i]);
    for (Eigen::Index i = 0; i < s.action.size(); ++i)
      out += "," + format_double(s.action[i]);
    out += "," + format_double(s.reward);
    out += s.terminal ? ",1\n" : ",0\n";
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw IoError("trajectory CSV: missing header");

  auto header = split_csv_line(lines[0]);
  int state_dim = 0, action_dim = 0;
  for (auto f : header) {
    if (f.rfind("state_", 0) == 0) ++state_dim;
    if (f.rfind("action_", 0) == 0) ++action_dim;
  }

  Trajectory traj;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    auto fields = split_csv_line(lines[li]);
    const std::size_t expected = 1 + state_dim + action_dim + 2;
    if (fields.size() != expected)
      throw IoError("trajectory CSV: row " + std::to_string(li) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(expected));
    TrajectoryStep step;
    std::size_t k = 1;
    step.state.resize(state_dim);
    for (int i = 0; i < state_dim; ++i) step.state[i] = parse_double(fields[k++]);
    step.action.resize(action_dim);
    for (int i = 0; i < action_dim; ++i) step.action[i] = parse_double(fields[k++]);
    step.reward = parse_double(fields[k++]);
    step.terminal = parse_int(fields[k]) != 0;
    traj.steps.push_back(std::move(step));
  }
  for (std::size_t t = 0; t + 1 < traj.steps.size(); ++t)
    traj.steps[t].next_state = traj.steps[t + 1].state;
  return traj;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
  write_text_file(path, trajectory_to_csv(traj));
}

Trajectory load_trajectory_csv(const std::string& path) {
  return trajectory_from_csv(read_text_file(path));
}

}  // namespace aura
