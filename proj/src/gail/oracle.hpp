#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arm/pipe_scene.hpp"
#include "control/pid.hpp"
#include "gail/demo.hpp"

namespace ssilkc::gail {

/// A waypoint for the scripted oracle: a tip position and, optionally, a tip
/// axis direction to hold there.
struct OracleWaypoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::optional<Eigen::Vector3d> tip_axis;
};

struct OracleOptions {
  double max_tip_step = 10.0;  // mm per resolved-rate step
  double reach_tolerance = 2.0;  // mm, waypoint reached
  control::PIDConfig pid;
  arm::ArmParams arm = arm::calibrated_params();
  int collision_samples = 60;
};

/// Raised when a resolved-rate step toward a waypoint would collide.
class OracleCollision : public std::runtime_error {
 public:
  OracleCollision(std::size_t index, double clearance);
  std::size_t waypoint_index;
  double clearance;
};

/// Servoes the arm from straight through the waypoints. Each intermediate
/// step is an IK solve seeded with the current springs followed by PID
/// tracking; every step is checked against the scene. One record is emitted
/// at the start and one per reached waypoint.
std::vector<DemoRecord> record_oracle_demo(const std::vector<OracleWaypoint>& waypoints, const arm::PipeScene& scene,
                                           const OracleOptions& opt, int sequence = 0);

/// Hand-authored pick-and-place route through a cross pipe: up the trunk,
/// into the +X branch (pick), back, into the -X branch (place), back.
std::vector<OracleWaypoint> cross_pipe_route(double diameter, double cross_height = 420.0);

/// Snapshot record of an environment state.
DemoRecord snapshot_record(const control::ArmEnv& env, const Pose6D& goal, const std::string& scene_id,
                           const std::string& source, int sequence);

}  // namespace ssilkc::gail
