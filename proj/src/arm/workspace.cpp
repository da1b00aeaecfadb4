#include "arm/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssilkc::arm {

WorkspaceReport sweep_workspace(const ArmParams& params, const std::vector<double>& pressure_levels, bool keep_tips,
                                double axis_tolerance) {
  if (pressure_levels.empty()) throw std::invalid_argument("sweep_workspace: no pressure levels");
  std::vector<double> lengths;
  for (double p : pressure_levels) lengths.push_back(equilibrium_length(p, 0.0, params).length);
  const std::size_t n = lengths.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < kChambers; ++i) total *= n;

  WorkspaceReport rep;
  constexpr double inf = std::numeric_limits<double>::infinity();
  double z_lo = inf, z_hi = -inf, axis_lo = inf, axis_hi = -inf;
  for (std::size_t code = 0; code < total; ++code) {
    ChamberVec l{};
    std::size_t c = code;
    for (std::size_t i = 0; i < kChambers; ++i) {
      l[i] = lengths[c % n];
      c /= n;
    }
    const Pose6D tip = forward_kinematics(l, params);
    const double r = std::hypot(tip.x, tip.y);
    z_lo = std::min(z_lo, tip.z);
    z_hi = std::max(z_hi, tip.z);
    if (r < axis_tolerance) {
      axis_lo = std::min(axis_lo, tip.z);
      axis_hi = std::max(axis_hi, tip.z);
    }
    rep.lateral_coverage = std::max(rep.lateral_coverage, r);
    rep.max_bend = std::max(rep.max_bend, tip_tilt_degrees(l, params));
    if (keep_tips) rep.tips.push_back(tip);
  }
  rep.samples = total;
  rep.z_min = z_lo;
  rep.z_max = z_hi;
  rep.z_extent = z_hi - z_lo;
  rep.vertical_coverage = axis_hi >= axis_lo ? axis_hi - axis_lo : 0.0;
  return rep;
}

}  // namespace ssilkc::arm
