#include "aura/learn/policy_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace aura {

namespace {

constexpr char kMagic[8] = {'A', 'U', 'R', 'A', 'P', 'O', 'L', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  out.append(p, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("policy container truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string policy_to_bytes(const StochasticPolicy& policy) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, static_cast<std::uint8_t>(policy.arch.flavor));
  put(out, static_cast<std::uint8_t>(policy.arch.goal_dim > 0 ? 1 : 0));
  put(out, static_cast<std::uint8_t>(policy.bound_goal.size() > 0 ? 1 : 0));
  put(out, static_cast<std::uint8_t>(0));
  put(out, static_cast<std::int32_t>(policy.arch.state_dim));
  put(out, static_cast<std::int32_t>(policy.arch.goal_dim));
  put(out, static_cast<std::int32_t>(policy.arch.n_actions));
  put(out, static_cast<std::int32_t>(policy.arch.action_dim));
  put(out, static_cast<std::int32_t>(policy.arch.n_states));
  put(out, static_cast<std::int32_t>(policy.arch.grid_width));
  put(out, static_cast<std::int32_t>(policy.arch.grid_height));
  put(out, policy.arch.temperature);
  put(out, policy.domain_id);
  put(out, static_cast<std::uint32_t>(policy.arch.hidden.size()));
  for (int h : policy.arch.hidden) put(out, static_cast<std::int32_t>(h));
  put(out, static_cast<std::uint32_t>(policy.bound_goal.size()));
  for (Eigen::Index i = 0; i < policy.bound_goal.size(); ++i)
    put(out, policy.bound_goal[i]);
  put(out, static_cast<std::uint64_t>(policy.params.size()));
  out.append(reinterpret_cast<const char*>(policy.params.data()),
             static_cast<std::size_t>(policy.params.size()) * sizeof(double));
  return out;
}

StochasticPolicy policy_from_bytes(const std::string& bytes) {
  std::size_t pos = 0;
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a policy container (bad magic)");
  pos = sizeof(kMagic);
  if (take<std::uint32_t>(bytes, pos) != kVersion)
    throw IoError("unsupported policy container version");

  StochasticPolicy p;
  p.arch.flavor = static_cast<PolicyFlavor>(take<std::uint8_t>(bytes, pos));
  take<std::uint8_t>(bytes, pos);  // goal_conditioned, implied by goal_dim
  bool has_goal = take<std::uint8_t>(bytes, pos) != 0;
  take<std::uint8_t>(bytes, pos);  // reserved
  p.arch.state_dim = take<std::int32_t>(bytes, pos);
  p.arch.goal_dim = take<std::int32_t>(bytes, pos);
  p.arch.n_actions = take<std::int32_t>(bytes, pos);
  p.arch.action_dim = take<std::int32_t>(bytes, pos);
  p.arch.n_states = take<std::int32_t>(bytes, pos);
  p.arch.grid_width = take<std::int32_t>(bytes, pos);
  p.arch.grid_height = take<std::int32_t>(bytes, pos);
  p.arch.temperature = take<double>(bytes, pos);
  p.domain_id = take<std::uint64_t>(bytes, pos);
  std::uint32_t hidden_count = take<std::uint32_t>(bytes, pos);
  p.arch.hidden.clear();
  for (std::uint32_t i = 0; i < hidden_count; ++i)
    p.arch.hidden.push_back(take<std::int32_t>(bytes, pos));
  std::uint32_t goal_len = take<std::uint32_t>(bytes, pos);
  p.bound_goal.resize(goal_len);
  for (std::uint32_t i = 0; i < goal_len; ++i)
    p.bound_goal[i] = take<double>(bytes, pos);
  if (!has_goal && goal_len > 0)
    throw IoError("policy container goal flag inconsistent");

  std::uint64_t n_params = take<std::uint64_t>(bytes, pos);
  if (n_params != static_cast<std::uint64_t>(StochasticPolicy::param_count(p.arch)))
    throw IoError("policy container parameter count does not match architecture");
  p.params.resize(static_cast<Eigen::Index>(n_params));
  if (pos + n_params * sizeof(double) > bytes.size())
    throw IoError("policy container truncated");
  std::memcpy(p.params.data(), bytes.data() + pos, n_params * sizeof(double));
  return p;
}

void save_policy(const StochasticPolicy& policy, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  std::string bytes = policy_to_bytes(policy);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

StochasticPolicy load_policy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return policy_from_bytes(ss.str());
}

}  // namespace aura
