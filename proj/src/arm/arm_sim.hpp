#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ssilkc::arm {

inline constexpr std::size_t kSections = 3;
inline constexpr std::size_t kChambersPerSection = 3;
inline constexpr std::size_t kChambers = kSections * kChambersPerSection;

using ChamberVec = std::array<double, kChambers>;
using Wrench = Eigen::Matrix<double, 6, 1>;  // force [N], moment [N*mm]
using Jacobian = Eigen::Matrix<double, 6, static_cast<int>(kChambers)>;

/// Geometric and actuation constants of the 3x3-chamber manipulator.
/// Lengths in mm, pressures in kPa, time in s.
struct ArmParams {
  double chamber_free_length = 200.0;
  double chamber_min = 105.0;
  double chamber_max = 235.0;
  double chamber_offset_radius = 35.0;  // d
  double spring_anchor_radius = 40.0;
  double pressure_min = -40.0;
  double pressure_max = 20.0;
  double pressure_gain = 2.375;       // mm per kPa
  double chamber_stiffness = 0.5;     // N per mm
  double settle_time_constant = 0.3;  // s
  double sim_dt = 0.03;               // s

  void validate() const;
};

/// Offset radius that makes the largest reachable whole-arm bend equal
/// `target_bend_deg`. The spring anchor radius keeps its ratio to d.
ArmParams calibrate_offset_radius(ArmParams params, double target_bend_deg = 95.0);

/// Default parameters with d calibrated to the 95 degree bend limit.
ArmParams calibrated_params();

/// Tip position in mm, orientation as Z-Y-X yaw/pitch/roll in degrees.
struct Pose6D {
  double x = 0, y = 0, z = 0;
  double yaw = 0, pitch = 0, roll = 0;

  [[nodiscard]] std::array<double, 6> to_array() const { return {x, y, z, yaw, pitch, roll}; }
  static Pose6D from_array(std::span<const double> v);
  [[nodiscard]] Eigen::Vector3d position() const { return {x, y, z}; }
  [[nodiscard]] double translation_distance(const Pose6D& other) const;
  bool operator==(const Pose6D&) const = default;
};

/// Wraps an angle in degrees onto (-180, 180].
double wrap_degrees(double deg);

/// Constant-curvature arc of one section.
struct SectionArc {
  double arc_length = 0;      // mm
  double curvature = 0;       // 1/mm
  double bend_plane_angle = 0;  // rad, (-pi, pi]

  [[nodiscard]] double bend_angle() const { return curvature * arc_length; }
};

/// Rigid transform of the tip (or any frame along the centerline).
struct Frame {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

/// Angular position of chamber `i` (0..2) around the section axis, rad.
/// Chambers are numbered clockwise seen from above: 0, -120, -240 degrees.
double chamber_angle(std::size_t i);

void check_chamber_bounds(std::span<const double> lengths, const ArmParams& params,
                          std::size_t first_index = 0);

/// Three parallel chamber lengths -> arc. Uses params for bounds and d.
SectionArc section_arc(double l1, double l2, double l3, const ArmParams& params);

/// Same reduction without bound checks; used for finite differences that
/// step a hair outside the chamber range.
SectionArc section_arc_unchecked(double l1, double l2, double l3, double offset_radius);

/// Homogeneous transform of one arc evaluated at arc parameter s in [0, L].
Frame arc_frame(const SectionArc& arc, double s);

Frame forward_frame(std::span<const double> chamber_lengths, const ArmParams& params);
Frame forward_frame_unchecked(std::span<const double> chamber_lengths, const ArmParams& params);

Pose6D frame_to_pose(const Frame& frame);
Eigen::Matrix3d ypr_to_rotation(double yaw_deg, double pitch_deg, double roll_deg);

Pose6D forward_kinematics(std::span<const double> chamber_lengths, const ArmParams& params);

/// Angle between the tip axis and the base +Z axis, degrees.
double tip_tilt_degrees(std::span<const double> chamber_lengths, const ArmParams& params);

ChamberVec spring_lengths(std::span<const double> chamber_lengths, const ArmParams& params);

/// Inverse of spring_lengths for colocated anchors: chamber lengths whose
/// springs read `springs`. No bound checks.
ChamberVec chambers_from_springs(std::span<const double> springs, const ArmParams& params);

/// Spatial Jacobian (linear rows in mm/mm, angular rows in rad/mm) by
/// central differences with the given step.
Jacobian finite_difference_jacobian(std::span<const double> chamber_lengths, const ArmParams& params,
                                    double step_mm = 0.5);

struct Equilibrium {
  double length = 0;
  bool saturated = false;
};

/// Quasi-static chamber length for pressure q [kPa] under an axial
/// compressive load [N].
Equilibrium equilibrium_length(double pressure, double load_axial_force, const ArmParams& params);

/// Pressure [kPa] that holds `length` with no load. Unclamped.
double rest_pressure(double length, const ArmParams& params);

struct ArmState {
  ChamberVec chamber_lengths{};
  ChamberVec pressures{};
  std::array<bool, kChambers> saturation_flags{};
  Wrench load_wrench = Wrench::Zero();

  [[nodiscard]] bool any_saturated() const;
};

/// State at rest at the given chamber lengths (pressures hold them unloaded).
ArmState rest_state(const ChamberVec& lengths, const ArmParams& params);

/// All chambers at the free length, zero pressure.
ArmState initial_state(const ArmParams& params);

/// Per-chamber compressive axial force from the tip wrench.
ChamberVec axial_loads(const ArmState& state, const ArmParams& params);

/// One quasi-static settling step of duration dt.
ArmState step(const ArmState& state, std::span<const double> pressures, double dt,
              const ArmParams& params);

/// Tip wrench of a point mass hanging at the tip (gravity along -Z).
Wrench mass_load(double grams);

}  // namespace ssilkc::arm
