#pragma once

#include <random>
#include <string>
#include <vector>

#include "arm/pipe_scene.hpp"
#include "control/pid.hpp"
#include "control/trajectory_log.hpp"
#include "rl/policy.hpp"
#include "s2r/s2r.hpp"

namespace ssilkc::control {

struct DeployConfig {
  rl::RLConfig rl;
  PIDConfig pid;
  int max_steps = 20;  // policy steps per goal
  /// Optional scene checked along the arm after every policy step.
  const arm::PipeScene* scene = nullptr;
};

struct DeployResult {
  TrajectoryLog log;
  bool success = false;   // observed scaled error below threshold
  bool collided = false;  // any post-step configuration hit the scene
  int steps = 0;
  std::string failure;    // empty on success
  arm::Pose6D observed;   // last pose fed to the policy
  arm::Pose6D measured;   // last pose of the physical arm
  double translation_error = 0;  // measured vs goal, mm
  double worst_clearance = 0;    // mm, over checked configurations
};

/// Pose the policy sees: the nominal-model pose, passed through the S2R
/// network when one is given.
arm::Pose6D observe_pose(const ArmEnv& env, const s2r::S2RModel* s2r);

/// Closed loop: observe, build the state, act deterministically, map the
/// frequencies to spring setpoints, track them with PID; until the observed
/// scaled error is below threshold or the step budget is spent.
DeployResult deploy_policy(const rl::Policy& policy, const s2r::S2RModel* s2r, const arm::Pose6D& goal, ArmEnv& env,
                           const DeployConfig& cfg);

struct PathMetrics {
  double rmse_translation = 0;  // mm
  double mean_abs_yaw = 0;      // deg
  double mean_abs_pitch = 0;
  double mean_abs_roll = 0;
  std::vector<bool> success;
  std::vector<double> translation_errors;
  std::size_t collisions = 0;
  TrajectoryLog log;

  [[nodiscard]] std::size_t success_count() const;
  [[nodiscard]] std::string summary() const;
};

/// Runs deploy_policy per waypoint without resetting the arm in between.
PathMetrics path_follow(const rl::Policy& policy, const s2r::S2RModel* s2r, const std::vector<arm::Pose6D>& waypoints,
                        ArmEnv& env, const DeployConfig& cfg);

}  // namespace ssilkc::control
