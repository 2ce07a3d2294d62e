#include "aura/envs/grid.hpp"

#include <algorithm>
#include <deque>

#include <nlohmann/json.hpp>

namespace aura {

namespace {
constexpr int kDx[4] = {0, 1, 0, -1};  // N, E, S, W
constexpr int kDy[4] = {-1, 0, 1, 0};
}  // namespace

GridState grid_move(const GridSpec& spec, const GridState& s, int action) {
  GridState n = s;
  switch (action) {
    case GridLeft:
      n.dir = (s.dir + 3) % 4;
      break;
    case GridRight:
      n.dir = (s.dir + 1) % 4;
      break;
    case GridForward: {
      int nx = s.x + kDx[s.dir];
      int ny = s.y + kDy[s.dir];
      if (spec.in_bounds(nx, ny)) {
        n.x = nx;
        n.y = ny;
      }
      break;
    }
    case GridStay:
      break;
    default:
      throw DomainError("grid action out of range: " + std::to_string(action));
  }
  return n;
}

double grid_reward(const GridSpec& spec, int step_count, bool succeeded) {
  if (!succeeded) return 0.0;
  return 1.0 - 0.9 * (static_cast<double>(step_count) / spec.effective_max_steps());
}

Eigen::VectorXd grid_features(const GridSpec& spec, const GridState& s) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(6);
  f[0] = static_cast<double>(s.x) / spec.width;
  f[1] = static_cast<double>(s.y) / spec.height;
  f[2 + s.dir] = 1.0;
  return f;
}

GridState grid_decode(const GridSpec& spec, const Eigen::VectorXd& features) {
  GridState s;
  s.x = static_cast<int>(std::lround(features[0] * spec.width));
  s.y = static_cast<int>(std::lround(features[1] * spec.height));
  Eigen::Index dir;
  features.segment(2, 4).maxCoeff(&dir);
  s.dir = static_cast<int>(dir);
  return s;
}

bool grid_path_exists(const GridSpec& spec, int sx, int sy, int gx, int gy) {
  if (!spec.in_bounds(sx, sy) || !spec.in_bounds(gx, gy)) return false;
  if (spec.is_lava(sx, sy) || spec.is_lava(gx, gy)) return false;
  std::vector<char> seen(spec.width * spec.height, 0);
  std::deque<std::pair<int, int>> frontier{{sx, sy}};
  seen[sy * spec.width + sx] = 1;
  while (!frontier.empty()) {
    auto [x, y] = frontier.front();
    frontier.pop_front();
    if (x == gx && y == gy) return true;
    for (int d = 0; d < 4; ++d) {
      int nx = x + kDx[d], ny = y + kDy[d];
      if (!spec.in_bounds(nx, ny) || spec.is_lava(nx, ny)) continue;
      if (seen[ny * spec.width + nx]) continue;
      seen[ny * spec.width + nx] = 1;
      frontier.emplace_back(nx, ny);
    }
  }
  return false;
}

GridDomain::GridDomain(GridSpec spec) : spec_(std::move(spec)) {
  if (spec_.width <= 0 || spec_.height <= 0)
    throw ConfigError("grid dimensions must be positive");
  if (spec_.goal_cells.empty()) throw ConfigError("grid needs goal cells");
  if (!spec_.in_bounds(spec_.start_x, spec_.start_y) ||
      spec_.is_lava(spec_.start_x, spec_.start_y))
    throw ConfigError("grid start outside bounds or on lava");
  for (auto [gx, gy] : spec_.goal_cells) {
    if (!spec_.in_bounds(gx, gy)) throw ConfigError("grid goal outside bounds");
    if (spec_.is_lava(gx, gy)) throw ConfigError("grid goal on lava");
    if (gx == spec_.start_x && gy == spec_.start_y)
      throw ConfigError("grid goal coincides with start");
  }

  actions_ = ActionSpace::discrete(4);
  std::vector<Eigen::VectorXd> pts;
  for (auto [gx, gy] : spec_.goal_cells) {
    Eigen::VectorXd p(2);
    p << static_cast<double>(gx), static_cast<double>(gy);
    pts.push_back(p);
  }
  goals_ = GoalSpace::discrete_set(std::move(pts));

  nlohmann::json j;
  j["family"] = "grid";
  j["width"] = spec_.width;
  j["height"] = spec_.height;
  j["start"] = {spec_.start_x, spec_.start_y, spec_.start_dir};
  auto lava = spec_.lava_cells;
  std::sort(lava.begin(), lava.end());
  j["lava"] = nlohmann::json::array();
  for (auto [x, y] : lava) j["lava"].push_back({x, y});
  j["goals"] = nlohmann::json::array();
  for (auto [x, y] : spec_.goal_cells) j["goals"].push_back({x, y});
  j["max_steps"] = spec_.effective_max_steps();
  spec_json_ = j.dump();
  id_ = fnv1a_str(spec_json_);
}

Eigen::VectorXd GridDomain::initial_state() const {
  return grid_features(spec_, {spec_.start_x, spec_.start_y, spec_.start_dir});
}

StepResult GridDomain::step(const Eigen::VectorXd& state,
                            const Eigen::VectorXd& action,
                            const Eigen::VectorXd& goal,
                            int step_number) const {
  GridState s = grid_decode(spec_, state);
  GridState n = grid_move(spec_, s, discrete_action(action));

  StepResult res;
  res.next_state = grid_features(spec_, n);
  if (spec_.is_lava(n.x, n.y)) {
    res.terminal = true;
    res.success = false;
    res.reward = grid_reward(spec_, step_number, false);
    return res;
  }
  int gx = static_cast<int>(std::lround(goal[0]));
  int gy = static_cast<int>(std::lround(goal[1]));
  if (n.x == gx && n.y == gy) {
    res.terminal = true;
    res.success = true;
    res.reward = grid_reward(spec_, step_number, true);
    return res;
  }
  res.reward = 0.0;
  return res;
}

Eigen::VectorXd GridDomain::achieved_goal(const Eigen::VectorXd& state) const {
  GridState s = grid_decode(spec_, state);
  Eigen::VectorXd g(2);
  g << static_cast<double>(s.x), static_cast<double>(s.y);
  return g;
}

int GridDomain::state_index(const Eigen::VectorXd& state) const {
  GridState s = grid_decode(spec_, state);
  return (s.y * spec_.width + s.x) * 4 + s.dir;
}

}  // namespace aura
