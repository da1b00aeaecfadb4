#include "arm/arm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

namespace ssilkc::arm {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix3d rot_z(double a) {
  return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

Eigen::Matrix3d rot_y(double a) {
  return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitY()).toRotationMatrix();
}

double deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace

void ArmParams::validate() const {
  if (!(chamber_min < chamber_free_length && chamber_free_length < chamber_max))
    throw std::invalid_argument("ArmParams: need chamber_min < chamber_free_length < chamber_max");
  if (!(sim_dt > 0)) throw std::invalid_argument("ArmParams: sim_dt must be positive");
  if (!(chamber_offset_radius > 0))
    throw std::invalid_argument("ArmParams: chamber_offset_radius must be positive");
  if (!(spring_anchor_radius > 0))
    throw std::invalid_argument("ArmParams: spring_anchor_radius must be positive");
  if (!(pressure_min < pressure_max))
    throw std::invalid_argument("ArmParams: need pressure_min < pressure_max");
  if (!(pressure_gain > 0) || !(chamber_stiffness > 0) || !(settle_time_constant > 0))
    throw std::invalid_argument("ArmParams: gain, stiffness and time constant must be positive");
}

ArmParams calibrate_offset_radius(ArmParams params, double target_bend_deg) {
  if (!(target_bend_deg > 0)) throw std::invalid_argument("calibrate: target bend must be positive");
  // A section bends most with one chamber at the minimum and the other two at
  // the maximum (or the mirror case); its bend is 2*(max-min)/(3d). Stacking
  // all sections in one plane gives the whole-arm limit.
  const double span = params.chamber_max - params.chamber_min;
  const double target = target_bend_deg * kPi / 180.0;
  const double d = static_cast<double>(kSections) * 2.0 * span / (3.0 * target);
  params.spring_anchor_radius *= d / params.chamber_offset_radius;
  params.chamber_offset_radius = d;
  return params;
}

ArmParams calibrated_params() { return calibrate_offset_radius(ArmParams{}); }

Pose6D Pose6D::from_array(std::span<const double> v) {
  if (v.size() != 6) throw std::invalid_argument("Pose6D: expected 6 values");
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

double Pose6D::translation_distance(const Pose6D& other) const {
  return (position() - other.position()).norm();
}

double wrap_degrees(double d) {
  double r = std::fmod(d, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

double chamber_angle(std::size_t i) { return -static_cast<double>(i) * 2.0 * kPi / 3.0; }

void check_chamber_bounds(std::span<const double> lengths, const ArmParams& params,
                          std::size_t first_index) {
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const double l = lengths[i];
    if (!(l >= params.chamber_min && l <= params.chamber_max)) {
      throw std::domain_error("chamber " + std::to_string(first_index + i) + " length " +
                              std::to_string(l) + " mm outside [" +
                              std::to_string(params.chamber_min) + ", " +
                              std::to_string(params.chamber_max) + "]");
    }
  }
}

SectionArc section_arc_unchecked(double l1, double l2, double l3, double d) {
  const double sum = l1 + l2 + l3;
  // Sum of squared pairwise differences: exactly zero for equal lengths.
  const double q = 0.5 * ((l1 - l2) * (l1 - l2) + (l2 - l3) * (l2 - l3) + (l1 - l3) * (l1 - l3));
  SectionArc arc;
  arc.arc_length = sum / 3.0;
  if (q <= 0.0) return arc;
  arc.curvature = 2.0 * std::sqrt(q) / (d * sum);
  double phi = std::atan2(std::sqrt(3.0) * (l2 - l3), l2 + l3 - 2.0 * l1);
  if (phi <= -kPi) phi = kPi;
  arc.bend_plane_angle = phi;
  return arc;
}

SectionArc section_arc(double l1, double l2, double l3, const ArmParams& params) {
  const std::array<double, 3> l{l1, l2, l3};
  check_chamber_bounds(l, params);
  if (!(params.chamber_offset_radius > 0)) throw std::domain_error("section_arc: d must be positive");
  return section_arc_unchecked(l1, l2, l3, params.chamber_offset_radius);
}

Frame arc_frame(const SectionArc& arc, double s) {
  const double theta = arc.curvature * s;
  const double phi = arc.bend_plane_angle;
  Frame f;
  Eigen::Vector3d local;
  if (arc.curvature == 0.0) {
    local = {0.0, 0.0, s};
  } else {
    const double half = std::sin(0.5 * theta);
    local = {2.0 * half * half / arc.curvature, 0.0, std::sin(theta) / arc.curvature};
  }
  const Eigen::Matrix3d rz = rot_z(phi);
  f.rotation = rz * rot_y(theta) * rz.transpose();
  f.position = rz * local;
  return f;
}

Frame forward_frame_unchecked(std::span<const double> lengths, const ArmParams& params) {
  if (lengths.size() != kChambers) throw std::invalid_argument("forward_kinematics: expected 9 lengths");
  Frame tip;
  for (std::size_t s = 0; s < kSections; ++s) {
    const auto arc = section_arc_unchecked(lengths[3 * s], lengths[3 * s + 1], lengths[3 * s + 2],
                                           params.chamber_offset_radius);
    const Frame local = arc_frame(arc, arc.arc_length);
    tip.position += tip.rotation * local.position;
    tip.rotation = tip.rotation * local.rotation;
  }
  return tip;
}

Frame forward_frame(std::span<const double> lengths, const ArmParams& params) {
  check_chamber_bounds(lengths, params);
  return forward_frame_unchecked(lengths, params);
}

Pose6D frame_to_pose(const Frame& f) {
  const Eigen::Matrix3d& r = f.rotation;
  Pose6D p;
  p.x = f.position.x();
  p.y = f.position.y();
  p.z = f.position.z();
  p.yaw = wrap_degrees(deg(std::atan2(r(1, 0), r(0, 0))));
  p.pitch = wrap_degrees(deg(std::asin(std::clamp(-r(2, 0), -1.0, 1.0))));
  p.roll = wrap_degrees(deg(std::atan2(r(2, 1), r(2, 2))));
  return p;
}

Eigen::Matrix3d ypr_to_rotation(double yaw_deg, double pitch_deg, double roll_deg) {
  const double k = kPi / 180.0;
  return rot_z(yaw_deg * k) * rot_y(pitch_deg * k) *
         Eigen::AngleAxisd(roll_deg * k, Eigen::Vector3d::UnitX()).toRotationMatrix();
}

Pose6D forward_kinematics(std::span<const double> lengths, const ArmParams& params) {
  return frame_to_pose(forward_frame(lengths, params));
}

double tip_tilt_degrees(std::span<const double> lengths, const ArmParams& params) {
  const Frame f = forward_frame(lengths, params);
  return deg(std::acos(std::clamp(f.rotation(2, 2), -1.0, 1.0)));
}

ChamberVec spring_lengths(std::span<const double> lengths, const ArmParams& params) {
  check_chamber_bounds(lengths, params);
  ChamberVec out{};
  for (std::size_t s = 0; s < kSections; ++s) {
    const auto arc = section_arc_unchecked(lengths[3 * s], lengths[3 * s + 1], lengths[3 * s + 2],
                                           params.chamber_offset_radius);
    for (std::size_t i = 0; i < kChambersPerSection; ++i) {
      out[3 * s + i] =
          arc.arc_length * (1.0 - arc.curvature * params.spring_anchor_radius *
                                      std::cos(arc.bend_plane_angle - chamber_angle(i)));
    }
  }
  return out;
}

ChamberVec chambers_from_springs(std::span<const double> springs, const ArmParams& params) {
  if (springs.size() != kChambers) throw std::invalid_argument("chambers_from_springs: expected 9 values");
  const double ratio = params.chamber_offset_radius / params.spring_anchor_radius;
  ChamberVec out{};
  for (std::size_t s = 0; s < kSections; ++s) {
    const double mean = (springs[3 * s] + springs[3 * s + 1] + springs[3 * s + 2]) / 3.0;
    for (std::size_t i = 0; i < kChambersPerSection; ++i)
      out[3 * s + i] = mean + (springs[3 * s + i] - mean) * ratio;
  }
  return out;
}

Jacobian finite_difference_jacobian(std::span<const double> lengths, const ArmParams& params,
                                    double h) {
  Jacobian j;
  ChamberVec plus{}, minus{};
  std::copy(lengths.begin(), lengths.end(), plus.begin());
  minus = plus;
  for (std::size_t i = 0; i < kChambers; ++i) {
    plus[i] += h;
    minus[i] -= h;
    const Frame fp = forward_frame_unchecked(plus, params);
    const Frame fm = forward_frame_unchecked(minus, params);
    j.block<3, 1>(0, static_cast<int>(i)) = (fp.position - fm.position) / (2.0 * h);
    const Eigen::Matrix3d dr = fp.rotation * fm.rotation.transpose();
    const Eigen::Matrix3d skew = 0.5 * (dr - dr.transpose());
    j.block<3, 1>(3, static_cast<int>(i)) =
        Eigen::Vector3d(skew(2, 1), skew(0, 2), skew(1, 0)) / (2.0 * h);
    plus[i] = lengths[i];
    minus[i] = lengths[i];
  }
  return j;
}

Equilibrium equilibrium_length(double q, double load_axial_force, const ArmParams& params) {
  if (!(q >= params.pressure_min && q <= params.pressure_max)) {
    throw std::domain_error("pressure " + std::to_string(q) + " kPa outside [" +
                            std::to_string(params.pressure_min) + ", " +
                            std::to_string(params.pressure_max) + "]");
  }
  const double raw = params.chamber_free_length + params.pressure_gain * q -
                     load_axial_force / params.chamber_stiffness;
  const double clamped = std::clamp(raw, params.chamber_min, params.chamber_max);
  return {clamped, clamped != raw};
}

double rest_pressure(double length, const ArmParams& params) {
  return (length - params.chamber_free_length) / params.pressure_gain;
}

bool ArmState::any_saturated() const {
  return std::any_of(saturation_flags.begin(), saturation_flags.end(), [](bool b) { return b; });
}

ArmState rest_state(const ChamberVec& lengths, const ArmParams& params) {
  check_chamber_bounds(lengths, params);
  ArmState s;
  s.chamber_lengths = lengths;
  for (std::size_t i = 0; i < kChambers; ++i)
    s.pressures[i] = std::clamp(rest_pressure(lengths[i], params), params.pressure_min, params.pressure_max);
  return s;
}

ArmState initial_state(const ArmParams& params) {
  ChamberVec l{};
  l.fill(params.chamber_free_length);
  return rest_state(l, params);
}

ChamberVec axial_loads(const ArmState& state, const ArmParams& params) {
  ChamberVec out{};
  if (state.load_wrench.isZero(0.0)) return out;
  const Jacobian j = finite_difference_jacobian(state.chamber_lengths, params);
  const Eigen::Matrix<double, 9, 1> generalized = j.transpose() * state.load_wrench;
  // Generalized force is work-conjugate to extension; compression is its negative.
  for (std::size_t i = 0; i < kChambers; ++i) out[i] = -generalized(static_cast<int>(i));
  return out;
}

ArmState step(const ArmState& state, std::span<const double> pressures, double dt,
              const ArmParams& params) {
  if (!(dt > 0)) throw std::domain_error("step: dt must be positive");
  if (pressures.size() != kChambers) throw std::invalid_argument("step: expected 9 pressures");
  const ChamberVec loads = axial_loads(state, params);
  const double alpha = 1.0 - std::exp(-dt / params.settle_time_constant);
  ArmState next = state;
  for (std::size_t i = 0; i < kChambers; ++i) {
    const Equilibrium eq = equilibrium_length(pressures[i], loads[i], params);
    next.pressures[i] = pressures[i];
    next.chamber_lengths[i] = std::clamp(
        state.chamber_lengths[i] + (eq.length - state.chamber_lengths[i]) * alpha,
        params.chamber_min, params.chamber_max);
    next.saturation_flags[i] = eq.saturated;
  }
  return next;
}

Wrench mass_load(double grams) {
  if (!(grams >= 0.0) || !std::isfinite(grams)) throw std::invalid_argument("mass_load: mass must be finite and non-negative");
  Wrench w = Wrench::Zero();
  w(2) = -grams * 1e-3 * 9.81;
  return w;
}

}  // namespace ssilkc::arm
