#pragma once

#include <array>
#include <random>

#include <Eigen/Core>

#include "arm/arm_sim.hpp"
#include "sensor/sensor_model.hpp"

namespace ssilkc::rl {

using arm::ChamberVec;
using arm::Pose6D;

struct RLConfig {
  std::array<double, 6> w{0.0056, 0.0056, 0.0056, 0.001, 0.001, 0.001};
  double goal_reward = 100.0;         // R_g
  double error_weight = 10.0;         // epsilon
  double step_weight = 0.1;           // zeta
  double saturation_penalty = 100.0;  // R_s
  double threshold = 0.03;            // theta
  double gamma = 0.98;
  int horizon = 50;
  int workers = 4;
  int max_consecutive_saturation = 5;

  void validate() const;
};

/// Pose difference a - b with angles wrapped onto (-180, 180].
std::array<double, 6> pose_difference(const Pose6D& a, const Pose6D& b);

struct RLState {
  Pose6D pose;  // pose after S2R transfer
  Pose6D goal;
  std::array<double, 6> scaled_error{};

  [[nodiscard]] double error_norm() const;
  [[nodiscard]] std::array<double, 18> to_array() const;
};

RLState build_state(const Pose6D& pose, const Pose6D& goal, const RLConfig& cfg);

struct Transition {
  RLState s;
  ChamberVec action{};    // sensor frequencies, Hz
  ChamberVec action_u{};  // the same action in normalized [-1, 1] coordinates
  RLState s_next;
  double reward = 0.0;
  int step = 0;  // episode step index N
  bool saturated = false;
  bool done = false;
  int goal_id = -1;
  bool relabeled = false;

  [[nodiscard]] const Pose6D& goal() const { return s.goal; }
};

enum class RewardBranch { GoalReached, Saturated, Shaped };

RewardBranch reward_branch(double next_error_norm, bool saturated, const RLConfig& cfg);
double compute_reward(const Transition& t, bool saturated, const RLConfig& cfg);

/// Goal replaced by the achieved next pose; reward R_g; terminal.
Transition relabel_goal(const Transition& t, const RLConfig& cfg);

/// Box of chamber lengths sampled uniformly when drawing goals.
struct WorkspaceBounds {
  ChamberVec lo{};
  ChamberVec hi{};
  static WorkspaceBounds full(const arm::ArmParams& params);
  void validate() const;
};

struct GoalSample {
  Pose6D pose;
  ChamberVec chamber_lengths{};
};

/// Rejection-free FK sampling: uniform chamber lengths, their achieved pose.
GoalSample sample_goal(const WorkspaceBounds& bounds, const arm::ArmParams& params, std::mt19937_64& rng);

/// Affine map between normalized actions u in [-1, 1] and sensor frequencies.
class ActionCodec {
 public:
  ActionCodec() = default;
  explicit ActionCodec(sensor::FrequencyBand band);
  /// Band whose mapped spring lengths cover the chamber length box.
  static ActionCodec for_arm(const sensor::SensorModel& sensor, const arm::ArmParams& params);

  [[nodiscard]] const sensor::FrequencyBand& band() const { return band_; }
  /// u is kept a hair inside (-1, 1) so the frequency stays inside the open band.
  [[nodiscard]] ChamberVec to_frequencies(std::span<const double> u) const;
  [[nodiscard]] ChamberVec to_normalized(std::span<const double> f) const;

 private:
  sensor::FrequencyBand band_;
};

/// Fixed affine scaling of states and goals into network inputs.
Eigen::VectorXd state_features(const RLState& s);
Eigen::VectorXd pose_features(const Pose6D& p);

}  // namespace ssilkc::rl
