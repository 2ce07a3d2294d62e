#include "aura/recognize/observation.hpp"

#include <algorithm>
#include <cmath>

#include "aura/core/csv.hpp"
#include "aura/core/trajectory_io.hpp"

namespace aura {

ObservationSequence mask(const Trajectory& traj, double observability,
                         MaskMode mode, std::uint64_t rng_seed) {
  if (traj.steps.empty()) throw DomainError("cannot mask an empty trajectory");
  if (observability <= 0.0 || observability > 1.0)
    throw ConfigError("observability must be in (0, 1]");

  const int total = traj.length();
  const int keep = std::max(
      1, static_cast<int>(std::lround(observability * total)));

  std::vector<int> indices;
  if (mode == MaskMode::Prefix) {
    for (int i = 0; i < keep; ++i) indices.push_back(i);
  } else {
    std::vector<int> all(total);
    for (int i = 0; i < total; ++i) all[i] = i;
    Rng rng(rng_seed);
    for (int i = 0; i < keep; ++i)
      std::swap(all[i], all[i + rng.uniform_int(total - i)]);
    indices.assign(all.begin(), all.begin() + keep);
    std::sort(indices.begin(), indices.end());
  }

  ObservationSequence obs;
  obs.source_length = total;
  obs.observability = observability;
  obs.mask_mode = mode;
  obs.seed = rng_seed;
  for (int i : indices)
    obs.pairs.emplace_back(traj.steps[i].state, traj.steps[i].action);
  return obs;
}

std::string observation_to_csv(const ObservationSequence& obs) {
  std::string out = "# observability=" + format_double(obs.observability) +
                    ",noise=" + format_double(obs.noise_level) + ",mode=" +
                    (obs.mask_mode == MaskMode::Prefix ? "prefix" : "uniform") +
                    ",seed=" + std::to_string(obs.seed) +
                    ",source_length=" + std::to_string(obs.source_length) + "\n";
  Trajectory as_traj;
  for (const auto& [state, action] : obs.pairs)
    as_traj.steps.push_back({state, action, 0.0, {}, false});
  out += trajectory_to_csv(as_traj);
  return out;
}

ObservationSequence observation_from_csv(const std::string& text) {
  auto lines = split_lines(text);
  if (lines.size() < 2 || lines[0].empty() || lines[0][0] != '#')
    throw IoError("observation CSV: missing metadata line");

  ObservationSequence obs;
  std::string_view meta = lines[0];
  meta.remove_prefix(1);
  while (!meta.empty() && meta.front() == ' ') meta.remove_prefix(1);
  for (auto field : split_csv_line(meta)) {
    auto eq = field.find('=');
    if (eq == std::string_view::npos) throw IoError("observation CSV: bad metadata");
    auto key = field.substr(0, eq);
    auto val = field.substr(eq + 1);
    if (key == "observability") obs.observability = parse_double(val);
    else if (key == "noise") obs.noise_level = parse_double(val);
    else if (key == "mode")
      obs.mask_mode = val == "prefix" ? MaskMode::Prefix : MaskMode::UniformSubsample;
    else if (key == "seed") obs.seed = parse_u64(val);
    else if (key == "source_length") obs.source_length = static_cast<int>(parse_int(val));
  }

  std::string body;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    body.append(lines[i]);
    body.push_back('\n');
  }
  Trajectory traj = trajectory_from_csv(body);
  for (const auto& step : traj.steps) obs.pairs.emplace_back(step.state, step.action);
  return obs;
}

void save_observation_csv(const ObservationSequence& obs, const std::string& path) {
  write_text_file(path, observation_to_csv(obs));
}

ObservationSequence load_observation_csv(const std::string& path) {
  return observation_from_csv(read_text_file(path));
}

}  // namespace aura
