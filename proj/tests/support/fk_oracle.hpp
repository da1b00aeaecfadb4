#pragma once

#include <cmath>

#include <Eigen/Geometry>

#include "arm/arm_sim.hpp"

namespace ssilkc::testing {

// Independent route: march along each section with small rotations about the
// fixed bending axis and sum midpoint tangents.
inline Eigen::Vector3d integrate_tip(const arm::ChamberVec& l, double d, int segments_per_section) {
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  for (int s = 0; s < 3; ++s) {
    const double l1 = l[3 * s], l2 = l[3 * s + 1], l3 = l[3 * s + 2];
    const double length = (l1 + l2 + l3) / 3.0;
    const double q = l1 * l1 + l2 * l2 + l3 * l3 - l1 * l2 - l2 * l3 - l1 * l3;
    const double kappa = q > 0 ? 2.0 * std::sqrt(q) / (d * (l1 + l2 + l3)) : 0.0;
    const double phi = q > 0 ? std::atan2(std::sqrt(3.0) * (l2 - l3), l2 + l3 - 2.0 * l1) : 0.0;
    const Eigen::Vector3d axis(-std::sin(phi), std::cos(phi), 0.0);
    const double ds = length / segments_per_section;
    const Eigen::Matrix3d half = Eigen::AngleAxisd(0.5 * kappa * ds, axis).toRotationMatrix();
    const Eigen::Matrix3d full = Eigen::AngleAxisd(kappa * ds, axis).toRotationMatrix();
    for (int k = 0; k < segments_per_section; ++k) {
      pos += rot * half * Eigen::Vector3d(0, 0, ds);
      rot = rot * full;
    }
  }
  return pos;
}

}  // namespace ssilkc::testing
