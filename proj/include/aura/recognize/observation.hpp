#pragma once

#include <string>
#include <vector>

#include "aura/core/types.hpp"

namespace aura {

enum class MaskMode : int { UniformSubsample = 0, Prefix = 1 };

// A partially observed trajectory: ordered (state, action) pairs taken
// intact from the source, plus provenance.
struct ObservationSequence {
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
  int source_length = 0;
  double observability = 1.0;
  double noise_level = 0.0;  // provenance from the generator, not applied here
  MaskMode mask_mode = MaskMode::UniformSubsample;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(pairs.size()); }
};

// Keeps max(1, round(observability * length)) pairs in original order:
// a uniform without-replacement subsample or the prefix.
ObservationSequence mask(const Trajectory& traj, double observability,
                         MaskMode mode, std::uint64_t rng_seed);

// Trajectory CSV dialect with a leading metadata line.
std::string observation_to_csv(const ObservationSequence& obs);
ObservationSequence observation_from_csv(const std::string& text);
void save_observation_csv(const ObservationSequence& obs, const std::string& path);
ObservationSequence load_observation_csv(const std::string& path);

}  // namespace aura
