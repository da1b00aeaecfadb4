#pragma once

#include <optional>

#include <Eigen/Core>

#include "arm/arm_sim.hpp"

namespace ssilkc::arm {

/// Damped least-squares inverse kinematics over spring lengths. Springs are
/// kept inside [spring_min, spring_max] so the chamber geometry they imply
/// stays inside the chamber box.
struct IkOptions {
  /// When set, the tip axis is also driven toward this unit direction;
  /// `axis_weight` converts the axis error (unitless) to mm.
  std::optional<Eigen::Vector3d> tip_axis;
  double axis_weight = 200.0;
  double damping = 1e-2;
  int max_iterations = 300;
  double tolerance = 1e-3;   // mm on the residual norm
  double max_step = 10.0;    // mm per iteration per spring
  double spring_min = 105.0;
  double spring_max = 235.0;
};

struct IkResult {
  ChamberVec springs{};
  ChamberVec chamber_lengths{};
  Pose6D pose;
  double position_error = 0;  // mm
  double axis_error_deg = 0;
  int iterations = 0;
  bool converged = false;
};

IkResult solve_ik(const Eigen::Vector3d& target, const ChamberVec& start_springs, const ArmParams& params,
                  const IkOptions& options = {});

/// Tip axis (third column of the tip rotation).
Eigen::Vector3d tip_axis(std::span<const double> chamber_lengths, const ArmParams& params);

}  // namespace ssilkc::arm
