#include "aura/envs/maze.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <nlohmann/json.hpp>

namespace aura {

namespace {
// Keeps clamped positions strictly inside the free cell.
constexpr double kWallMargin = 1e-9;
}  // namespace

std::vector<char> open_layout(int size) {
  std::vector<char> w(static_cast<std::size_t>(size) * size, 0);
  for (int i = 0; i < size; ++i) {
    w[i] = 1;
    w[static_cast<std::size_t>(size - 1) * size + i] = 1;
    w[static_cast<std::size_t>(i) * size] = 1;
    w[static_cast<std::size_t>(i) * size + size - 1] = 1;
  }
  return w;
}

std::vector<char> four_rooms_layout(int size) {
  auto w = open_layout(size);
  const int mid = size / 2;
  const int door_a = (1 + mid) / 2;
  const int door_b = (mid + size - 1) / 2;
  for (int i = 1; i < size - 1; ++i) {
    if (i != door_a && i != door_b) {
      w[static_cast<std::size_t>(mid) * size + i] = 1;  // horizontal wall row
      w[static_cast<std::size_t>(i) * size + mid] = 1;  // vertical wall column
    }
  }
  return w;
}

MazeIntegration maze_integrate(const MazeSpec& spec, const Eigen::VectorXd& state,
                               const Eigen::VectorXd& action) {
  if (state.size() != 4) throw DomainError("maze state must be 4-dimensional");
  if (action.size() != 2) throw DomainError("maze action must be 2-dimensional");

  MazeIntegration out;
  Eigen::Vector2d force(action[0], action[1]);
  for (int i = 0; i < 2; ++i) {
    if (std::abs(force[i]) > spec.max_force) {
      force[i] = std::clamp(force[i], -spec.max_force, spec.max_force);
      out.force_clamped = true;
    }
  }

  double x = state[0], y = state[1];
  Eigen::Vector2d vel(state[2], state[3]);
  vel = (1.0 - spec.damping) * vel + spec.dt * force;

  // Axis-separated sweep. Per-step displacement is far below the unit cell
  // size, so single-cell checks cannot tunnel.
  double nx = x + spec.dt * vel[0];
  if (spec.wall_at(nx, y)) {
    nx = vel[0] > 0 ? std::floor(nx) - kWallMargin : std::floor(nx) + 1.0 + kWallMargin;
    vel[0] = 0.0;
  }
  double ny = y + spec.dt * vel[1];
  if (spec.wall_at(nx, ny)) {
    ny = vel[1] > 0 ? std::floor(ny) - kWallMargin : std::floor(ny) + 1.0 + kWallMargin;
    vel[1] = 0.0;
  }

  out.next_state.resize(4);
  out.next_state << nx, ny, vel[0], vel[1];
  return out;
}

double maze_reward(const MazeSpec& spec, const Eigen::VectorXd& pos,
                   const Eigen::VectorXd& goal) {
  return (pos - goal).norm() < spec.success_radius ? 0.0 : -1.0;
}

MazeDomain::MazeDomain(MazeSpec spec) : spec_(std::move(spec)) {
  if (spec_.size < 3) throw ConfigError("maze size too small");
  if (spec_.wall_layout.size() !=
      static_cast<std::size_t>(spec_.size) * spec_.size)
    throw ConfigError("maze wall layout size mismatch");
  if (spec_.wall_at(spec_.start_x, spec_.start_y))
    throw ConfigError("maze start inside a wall");
  if (spec_.goal_cells.empty()) throw ConfigError("maze needs goal cells");
  for (auto [gx, gy] : spec_.goal_cells)
    if (spec_.wall(gx, gy)) throw ConfigError("maze goal inside a wall");

  Eigen::VectorXd lo(2), hi(2);
  lo << -spec_.max_force, -spec_.max_force;
  hi << spec_.max_force, spec_.max_force;
  actions_ = ActionSpace::box(lo, hi);

  std::vector<Eigen::VectorXd> pts;
  for (auto [gx, gy] : spec_.goal_cells) {
    Eigen::VectorXd p(2);
    p << gx + 0.5, gy + 0.5;
    pts.push_back(p);
  }
  goals_ = GoalSpace::discrete_set(std::move(pts));

  nlohmann::json j;
  j["family"] = "maze";
  j["size"] = spec_.size;
  j["walls"] = nlohmann::json::array();
  for (int y = 0; y < spec_.size; ++y)
    for (int x = 0; x < spec_.size; ++x)
      if (spec_.wall(x, y)) j["walls"].push_back({x, y});
  j["start"] = {spec_.start_x, spec_.start_y};
  j["goals"] = nlohmann::json::array();
  for (auto [x, y] : spec_.goal_cells) j["goals"].push_back({x, y});
  j["success_radius"] = spec_.success_radius;
  j["dt"] = spec_.dt;
  j["damping"] = spec_.damping;
  j["max_force"] = spec_.max_force;
  j["max_steps"] = spec_.max_steps;
  spec_json_ = j.dump();
  id_ = fnv1a_str(spec_json_);
}

Eigen::VectorXd MazeDomain::initial_state() const {
  Eigen::VectorXd s(4);
  s << spec_.start_x, spec_.start_y, 0.0, 0.0;
  return s;
}

StepResult MazeDomain::step(const Eigen::VectorXd& state,
                            const Eigen::VectorXd& action,
                            const Eigen::VectorXd& goal, int) const {
  auto integ = maze_integrate(spec_, state, action);
  StepResult res;
  res.next_state = integ.next_state;
  res.clamped = integ.force_clamped;
  Eigen::VectorXd pos = integ.next_state.head(2);
  res.reward = maze_reward(spec_, pos, goal);
  if ((pos - goal).norm() < spec_.success_radius) {
    res.terminal = true;
    res.success = true;
  }
  return res;
}

Eigen::VectorXd MazeDomain::achieved_goal(const Eigen::VectorXd& state) const {
  return state.head(2);
}

bool maze_path_exists(const MazeSpec& spec, int sx, int sy, int gx, int gy) {
  if (spec.wall(sx, sy) || spec.wall(gx, gy)) return false;
  std::vector<char> seen(static_cast<std::size_t>(spec.size) * spec.size, 0);
  std::deque<std::pair<int, int>> frontier{{sx, sy}};
  seen[static_cast<std::size_t>(sy) * spec.size + sx] = 1;
  constexpr int dx[4] = {0, 1, 0, -1};
  constexpr int dy[4] = {-1, 0, 1, 0};
  while (!frontier.empty()) {
    auto [x, y] = frontier.front();
    frontier.pop_front();
    if (x == gx && y == gy) return true;
    for (int d = 0; d < 4; ++d) {
      int nx = x + dx[d], ny = y + dy[d];
      if (spec.wall(nx, ny)) continue;
      if (seen[static_cast<std::size_t>(ny) * spec.size + nx]) continue;
      seen[static_cast<std::size_t>(ny) * spec.size + nx] = 1;
      frontier.emplace_back(nx, ny);
    }
  }
  return false;
}

}  // namespace aura
