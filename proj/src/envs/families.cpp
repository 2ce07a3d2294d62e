#include "aura/envs/families.hpp"

#include <algorithm>
#include <cmath>

namespace aura {

namespace {

constexpr int kMaxRejections = 1000;

DomainPtr sample_grid(const GridFamily& fam, Rng& rng) {
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    GridSpec spec;
    spec.width = fam.width;
    spec.height = fam.height;
    spec.start_x = fam.start_x;
    spec.start_y = fam.start_y;
    spec.start_dir = fam.start_dir;
    spec.max_steps = fam.max_steps;

    int lava_count = fam.lava_min + rng.uniform_int(fam.lava_max - fam.lava_min + 1);
    auto taken = [&](int x, int y) {
      if (x == spec.start_x && y == spec.start_y) return true;
      for (auto [lx, ly] : spec.lava_cells)
        if (lx == x && ly == y) return true;
      for (auto [gx, gy] : spec.goal_cells)
        if (gx == x && gy == y) return true;
      return false;
    };

    if (!fam.goal_pool.empty()) {
      spec.goal_cells = fam.goal_pool;
    } else {
      int tries = 0;
      while (static_cast<int>(spec.goal_cells.size()) < fam.goals_per_domain &&
             tries++ < 200) {
        int x = rng.uniform_int(spec.width);
        int y = rng.uniform_int(spec.height);
        if (!taken(x, y)) spec.goal_cells.emplace_back(x, y);
      }
      if (static_cast<int>(spec.goal_cells.size()) < fam.goals_per_domain) continue;
    }
    for (int i = 0; i < lava_count; ++i) {
      for (int tries = 0; tries < 100; ++tries) {
        int x = rng.uniform_int(spec.width);
        int y = rng.uniform_int(spec.height);
        if (!taken(x, y)) {
          spec.lava_cells.emplace_back(x, y);
          break;
        }
      }
    }

    bool reachable = true;
    for (auto [gx, gy] : spec.goal_cells)
      if (!grid_path_exists(spec, spec.start_x, spec.start_y, gx, gy)) {
        reachable = false;
        break;
      }
    if (!reachable) continue;
    return std::make_shared<GridDomain>(std::move(spec));
  }
  throw ConfigError("grid sampling exhausted 1000 rejections; descriptor over-constrained");
}

DomainPtr sample_maze(const MazeFamily& fam, Rng& rng) {
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    MazeSpec spec;
    spec.size = fam.size_min + rng.uniform_int(fam.size_max - fam.size_min + 1);
    spec.success_radius = fam.success_radius;
    spec.dt = fam.dt;
    spec.damping = fam.damping;
    spec.max_force = fam.max_force;
    spec.max_steps = fam.max_steps;

    int layout_kind = fam.four_rooms_only ? 1 : rng.uniform_int(3);
    if (layout_kind == 1 && spec.size >= 7)
      spec.wall_layout = four_rooms_layout(spec.size);
    else
      spec.wall_layout = open_layout(spec.size);
    if (layout_kind == 2) {
      int extra = rng.uniform_int(spec.size);
      for (int i = 0; i < extra; ++i) {
        int x = 1 + rng.uniform_int(spec.size - 2);
        int y = 1 + rng.uniform_int(spec.size - 2);
        spec.wall_layout[static_cast<std::size_t>(y) * spec.size + x] = 1;
      }
    }

    auto free_cells = [&] {
      std::vector<std::pair<int, int>> cells;
      for (int y = 1; y < spec.size - 1; ++y)
        for (int x = 1; x < spec.size - 1; ++x)
          if (!spec.wall(x, y)) cells.emplace_back(x, y);
      return cells;
    }();
    if (free_cells.size() < static_cast<std::size_t>(fam.goals_per_domain) + 1)
      continue;

    if (fam.fixed_start) {
      spec.start_x = fam.start_x;
      spec.start_y = fam.start_y;
    } else {
      auto [sx, sy] = free_cells[rng.uniform_int(static_cast<int>(free_cells.size()))];
      spec.start_x = sx + 0.5;
      spec.start_y = sy + 0.5;
    }
    if (spec.wall_at(spec.start_x, spec.start_y)) continue;

    if (!fam.goal_pool.empty()) {
      spec.goal_cells = fam.goal_pool;
    } else {
      int tries = 0;
      while (static_cast<int>(spec.goal_cells.size()) < fam.goals_per_domain &&
             tries++ < 200) {
        auto [gx, gy] = free_cells[rng.uniform_int(static_cast<int>(free_cells.size()))];
        double d = std::hypot(gx + 0.5 - spec.start_x, gy + 0.5 - spec.start_y);
        if (d < fam.goal_dist_min || d > fam.goal_dist_max) continue;
        bool dup = false;
        for (auto [ox, oy] : spec.goal_cells)
          if (ox == gx && oy == gy) dup = true;
        if (!dup) spec.goal_cells.emplace_back(gx, gy);
      }
      if (static_cast<int>(spec.goal_cells.size()) < fam.goals_per_domain) continue;
    }

    int scx = static_cast<int>(std::floor(spec.start_x));
    int scy = static_cast<int>(std::floor(spec.start_y));
    bool reachable = true;
    for (auto [gx, gy] : spec.goal_cells)
      if (spec.wall(gx, gy) || !maze_path_exists(spec, scx, scy, gx, gy)) {
        reachable = false;
        break;
      }
    if (!reachable) continue;
    return std::make_shared<MazeDomain>(std::move(spec));
  }
  throw ConfigError("maze sampling exhausted 1000 rejections; descriptor over-constrained");
}

}  // namespace

DomainPtr sample_domain(const DomainDistribution& dist, std::uint64_t seed) {
  Rng rng(seed);
  switch (dist.family) {
    case DomainDistribution::Family::Grid:
      return sample_grid(dist.grid, rng);
    case DomainDistribution::Family::Maze:
      return sample_maze(dist.maze, rng);
    case DomainDistribution::Family::Reach:
      return std::make_shared<ReachDomain>(dist.reach.base);
  }
  throw ConfigError("unknown domain family");
}

Task sample_task(const DomainDistribution& dist, std::uint64_t seed) {
  Task task;
  task.domain = sample_domain(dist, derive_seed(seed, {0xd0}));
  Rng rng(derive_seed(seed, {0xd1}));
  task.goal = task.domain->goal_space().sample(rng);
  return task;
}

}  // namespace aura
