#pragma once

#include <string>

#include "aura/core/types.hpp"

namespace aura {

// CSV with one row per step: step_index, state_0.., action_0.., reward,
// terminal. The header names every dimension. The format carries no goal,
// seed, or success metadata; the loader rebuilds next_state by chaining rows
// and leaves the last one empty.
std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& text);

void save_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);

// Whole-file helpers shared by the serialization code.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace aura
