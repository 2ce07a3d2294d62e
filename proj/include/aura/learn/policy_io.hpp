#pragma once

#include <string>

#include "aura/learn/policy.hpp"

namespace aura {

// Versioned binary policy container: fixed header (magic, version, flavor,
// architecture dims, domain id, optional bound goal) followed by the raw
// little-endian float64 parameter payload. Round-trips are bit-exact.
void save_policy(const StochasticPolicy& policy, const std::string& path);
StochasticPolicy load_policy(const std::string& path);

std::string policy_to_bytes(const StochasticPolicy& policy);
StochasticPolicy policy_from_bytes(const std::string& bytes);

}  // namespace aura
