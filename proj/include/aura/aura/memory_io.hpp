#pragma once

#include <string>

#include "aura/aura/orchestrator.hpp"

namespace aura {

// Persists a memory as a directory: index.json (mode, accounting, policy file
// table), history.csv, and one binary policy file per cached entry. Loading
// reproduces recognition decisions exactly; the transient init_curve is not
// stored.
void save_memory(const Memory& memory, const std::string& dir);
Memory load_memory(const std::string& dir);

}  // namespace aura
