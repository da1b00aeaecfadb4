#include "rl/rl_types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssilkc::rl {

namespace {

constexpr double kInsideBand = 1.0 - 1e-9;

}  // namespace

void RLConfig::validate() const {
  if (!(threshold > 0)) throw std::invalid_argument("rl.threshold must be positive");
  if (!(gamma >= 0 && gamma < 1)) throw std::invalid_argument("rl.gamma must lie in [0, 1)");
  if (horizon <= 0) throw std::invalid_argument("rl.horizon must be positive");
  if (workers <= 0) throw std::invalid_argument("rl.workers must be positive");
  for (double v : w)
    if (!(v >= 0)) throw std::invalid_argument("rl.w entries must be non-negative");
}

std::array<double, 6> pose_difference(const Pose6D& a, const Pose6D& b) {
  return {a.x - b.x,
          a.y - b.y,
          a.z - b.z,
          arm::wrap_degrees(a.yaw - b.yaw),
          arm::wrap_degrees(a.pitch - b.pitch),
          arm::wrap_degrees(a.roll - b.roll)};
}

double RLState::error_norm() const {
  double s = 0.0;
  for (double e : scaled_error) s += e * e;
  return std::sqrt(s);
}

std::array<double, 18> RLState::to_array() const {
  std::array<double, 18> out{};
  const auto p = pose.to_array();
  const auto g = goal.to_array();
  std::copy(p.begin(), p.end(), out.begin());
  std::copy(g.begin(), g.end(), out.begin() + 6);
  std::copy(scaled_error.begin(), scaled_error.end(), out.begin() + 12);
  return out;
}

RLState build_state(const Pose6D& pose, const Pose6D& goal, const RLConfig& cfg) {
  RLState s;
  s.pose = pose;
  s.goal = goal;
  const auto d = pose_difference(pose, goal);
  for (std::size_t i = 0; i < 6; ++i) s.scaled_error[i] = cfg.w[i] * d[i];
  return s;
}

RewardBranch reward_branch(double next_error_norm, bool saturated, const RLConfig& cfg) {
  if (next_error_norm < cfg.threshold) return RewardBranch::GoalReached;
  if (saturated) return RewardBranch::Saturated;
  return RewardBranch::Shaped;
}

double compute_reward(const Transition& t, bool saturated, const RLConfig& cfg) {
  if (t.step < 0) throw std::domain_error("compute_reward: negative step count");
  const double e = t.s_next.error_norm();
  switch (reward_branch(e, saturated, cfg)) {
    case RewardBranch::GoalReached:
      return cfg.goal_reward;
    case RewardBranch::Saturated:
      return -cfg.saturation_penalty;
    case RewardBranch::Shaped:
      break;
  }
  return -cfg.error_weight * e - cfg.step_weight * static_cast<double>(t.step);
}

Transition relabel_goal(const Transition& t, const RLConfig& cfg) {
  Transition r = t;
  const Pose6D achieved = t.s_next.pose;
  r.s = build_state(t.s.pose, achieved, cfg);
  r.s_next = build_state(achieved, achieved, cfg);
  r.reward = cfg.goal_reward;
  r.done = true;
  r.relabeled = true;
  return r;
}

WorkspaceBounds WorkspaceBounds::full(const arm::ArmParams& params) {
  WorkspaceBounds b;
  b.lo.fill(params.chamber_min);
  b.hi.fill(params.chamber_max);
  return b;
}

void WorkspaceBounds::validate() const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("WorkspaceBounds: empty interval");
}

GoalSample sample_goal(const WorkspaceBounds& bounds, const arm::ArmParams& params, std::mt19937_64& rng) {
  bounds.validate();
  GoalSample g;
  for (std::size_t i = 0; i < g.chamber_lengths.size(); ++i) {
    if (bounds.lo[i] == bounds.hi[i]) {
      g.chamber_lengths[i] = bounds.lo[i];
    } else {
      std::uniform_real_distribution<double> u(bounds.lo[i], bounds.hi[i]);
      g.chamber_lengths[i] = u(rng);
    }
  }
  g.pose = arm::forward_kinematics(g.chamber_lengths, params);
  return g;
}

ActionCodec::ActionCodec(sensor::FrequencyBand band) : band_(band) {
  if (!(band.lo > 0 && band.lo < band.hi)) throw std::invalid_argument("ActionCodec: invalid band");
}

ActionCodec ActionCodec::for_arm(const sensor::SensorModel& sensor, const arm::ArmParams& params) {
  return ActionCodec(sensor.action_band(params.chamber_min, params.chamber_max));
}

ChamberVec ActionCodec::to_frequencies(std::span<const double> u) const {
  if (u.size() != arm::kChambers) throw std::invalid_argument("ActionCodec: expected 9 components");
  ChamberVec f{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = std::clamp(u[i], -kInsideBand, kInsideBand);
    f[i] = band_.lo + 0.5 * (v + 1.0) * (band_.hi - band_.lo);
  }
  return f;
}

ChamberVec ActionCodec::to_normalized(std::span<const double> f) const {
  if (f.size() != arm::kChambers) throw std::invalid_argument("ActionCodec: expected 9 components");
  ChamberVec u{};
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 2.0 * (f[i] - band_.lo) / (band_.hi - band_.lo) - 1.0;
  return u;
}

Eigen::VectorXd pose_features(const Pose6D& p) {
  Eigen::VectorXd v(6);
  v << p.x / 250.0, p.y / 250.0, (p.z - 450.0) / 250.0, p.yaw / 180.0, p.pitch / 180.0, p.roll / 180.0;
  return v;
}

Eigen::VectorXd state_features(const RLState& s) {
  Eigen::VectorXd v(18);
  v.head(6) = pose_features(s.pose);
  v.segment(6, 6) = pose_features(s.goal);
  for (int i = 0; i < 6; ++i) v[12 + i] = 4.0 * s.scaled_error[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace ssilkc::rl
