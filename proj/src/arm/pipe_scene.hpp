#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arm/arm_sim.hpp"

namespace ssilkc::arm {

struct Cylinder {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();  // axis midpoint, mm
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  double radius = 0;       // mm, may be +inf
  double half_length = 0;  // mm, may be +inf
};

/// Confined workspace made of a union of closed cylinders.
struct PipeScene {
  std::vector<Cylinder> cylinders;
  double arm_body_radius = 30.0;
  std::string id = "scene";

  void validate() const;

  /// Distance from p to the nearest wall of the union, positive inside.
  [[nodiscard]] double signed_wall_distance(const Eigen::Vector3d& p) const;
};

struct CollisionReport {
  bool collides = false;
  double worst_clearance = 0;  // mm, min over samples of (wall distance - body radius)
};

/// n_samples points evenly spaced in arc length along the centerline, base to tip.
std::vector<Eigen::Vector3d> centerline_samples(std::span<const double> chamber_lengths,
                                                const ArmParams& params, int n_samples);

CollisionReport collision_check(std::span<const double> chamber_lengths, const PipeScene& scene,
                                const ArmParams& params, int n_samples = 60);

/// Parses `cylinder ox oy oz dx dy dz radius half_length` lines. Also accepts
/// `arm_body_radius r` and `id name`; `#` starts a comment.
PipeScene parse_scene(std::istream& in);
PipeScene load_scene(const std::string& path);
std::string format_scene(const PipeScene& scene);

/// Cross-shaped pipe around the arm: a vertical trunk coaxial with the base
/// axis crossed by a horizontal branch along X at `cross_height`.
PipeScene cross_pipe_scene(double diameter, double cross_height = 420.0, double arm_body_radius = 30.0);

/// Unbounded scene (no walls anywhere).
PipeScene open_scene();

}  // namespace ssilkc::arm
