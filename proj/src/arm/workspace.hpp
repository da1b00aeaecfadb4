#pragma once

#include <vector>

#include "arm/arm_sim.hpp"

namespace ssilkc::arm {

struct WorkspaceReport {
  std::size_t samples = 0;
  double vertical_coverage = 0;  // mm, z extent of the reachable points on the base axis
  double lateral_coverage = 0;   // mm, largest distance of a tip point from the base axis
  double z_extent = 0;           // mm, z extent of all reachable points
  double max_bend = 0;           // deg, largest tip tilt
  double z_min = 0, z_max = 0;
  std::vector<Pose6D> tips;      // filled when requested
};

/// Every combination of the pressure levels over the nine chambers, each
/// settled unloaded; the tip of each combination is one sample.
WorkspaceReport sweep_workspace(const ArmParams& params, const std::vector<double>& pressure_levels = {-40.0, 0.0, 20.0},
                                bool keep_tips = false, double axis_tolerance = 5.0);

}  // namespace ssilkc::arm
