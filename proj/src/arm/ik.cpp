#include "arm/ik.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace ssilkc::arm {

namespace {

constexpr int kResidualRows = 6;

Eigen::Matrix<double, kResidualRows, 1> residual(const ChamberVec& springs, const Eigen::Vector3d& target,
                                                 const ArmParams& params, const IkOptions& opt) {
  const ChamberVec l = chambers_from_springs(springs, params);
  const Frame f = forward_frame_unchecked(l, params);
  Eigen::Matrix<double, kResidualRows, 1> r = Eigen::Matrix<double, kResidualRows, 1>::Zero();
  r.head<3>() = f.position - target;
  if (opt.tip_axis) r.tail<3>() = opt.axis_weight * (f.rotation.col(2) - opt.tip_axis->normalized());
  return r;
}

}  // namespace

Eigen::Vector3d tip_axis(std::span<const double> chamber_lengths, const ArmParams& params) {
  return forward_frame(chamber_lengths, params).rotation.col(2);
}

IkResult solve_ik(const Eigen::Vector3d& target, const ChamberVec& start, const ArmParams& params,
                  const IkOptions& opt) {
  ChamberVec q = start;
  for (auto& v : q) v = std::clamp(v, opt.spring_min, opt.spring_max);
  IkResult out;
  const double h = 0.05;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const auto r = residual(q, target, params, opt);
    out.iterations = it;
    if (r.norm() < opt.tolerance) {
      out.converged = true;
      break;
    }
    Eigen::Matrix<double, kResidualRows, static_cast<int>(kChambers)> jac;
    for (std::size_t i = 0; i < kChambers; ++i) {
      ChamberVec up = q, dn = q;
      up[i] += h;
      dn[i] -= h;
      jac.col(static_cast<Eigen::Index>(i)) = (residual(up, target, params, opt) - residual(dn, target, params, opt)) / (2 * h);
    }
    const Eigen::Matrix<double, kResidualRows, kResidualRows> jjt =
        jac * jac.transpose() + opt.damping * opt.damping * Eigen::Matrix<double, kResidualRows, kResidualRows>::Identity();
    Eigen::Matrix<double, static_cast<int>(kChambers), 1> dq = -jac.transpose() * jjt.ldlt().solve(r);
    const double largest = dq.cwiseAbs().maxCoeff();
    if (largest > opt.max_step) dq *= opt.max_step / largest;
    ChamberVec next = q;
    for (std::size_t i = 0; i < kChambers; ++i)
      next[i] = std::clamp(q[i] + dq[static_cast<Eigen::Index>(i)], opt.spring_min, opt.spring_max);
    // Backtrack if the projected step does not reduce the residual.
    double scale = 1.0;
    while (residual(next, target, params, opt).norm() > r.norm() && scale > 1e-3) {
      scale *= 0.5;
      for (std::size_t i = 0; i < kChambers; ++i)
        next[i] = std::clamp(q[i] + scale * dq[static_cast<Eigen::Index>(i)], opt.spring_min, opt.spring_max);
    }
    if (next == q) break;
    q = next;
  }
  out.springs = q;
  out.chamber_lengths = chambers_from_springs(q, params);
  const Frame f = forward_frame_unchecked(out.chamber_lengths, params);
  out.pose = frame_to_pose(f);
  out.position_error = (f.position - target).norm();
  if (opt.tip_axis) {
    const double c = std::clamp(f.rotation.col(2).dot(opt.tip_axis->normalized()), -1.0, 1.0);
    out.axis_error_deg = std::acos(c) * 180.0 / std::numbers::pi;
  }
  if (!out.converged) out.converged = residual(q, target, params, opt).norm() < opt.tolerance;
  return out;
}

}  // namespace ssilkc::arm
