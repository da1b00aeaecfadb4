#pragma once

#include <cstdint>
#include <random>

#include "arm/arm_sim.hpp"
#include "sensor/sensor_model.hpp"

namespace ssilkc::control {

/// Systematic differences of a "real" arm relative to the nominal model.
struct RealityPerturbation {
  double stiffness_scale = 1.0;
  arm::ChamberVec length_bias{};  // mm, added to the sensed chamber geometry
  double pose_noise_sigma = 0.0;  // mm, isotropic tip position noise

  [[nodiscard]] bool is_identity() const;
  /// Stiffness x1.1, +/-2 mm alternating bias, 1 mm noise.
  static RealityPerturbation default_gap();
};

/// Simulated arm with spring sensing, an optional tip load and an optional
/// reality perturbation. Owns its state; not shared between threads.
class ArmEnv {
 public:
  explicit ArmEnv(arm::ArmParams params = arm::calibrated_params(),
                  sensor::SensorModel sensor = sensor::SensorModel{},
                  RealityPerturbation perturbation = {}, std::uint64_t noise_seed = 0);

  [[nodiscard]] const arm::ArmParams& params() const { return params_; }
  [[nodiscard]] const sensor::SensorModel& sensor() const { return sensor_; }
  [[nodiscard]] const arm::ArmState& state() const { return state_; }
  [[nodiscard]] const RealityPerturbation& perturbation() const { return perturbation_; }
  [[nodiscard]] double time() const { return time_; }

  void reset(const arm::ChamberVec& chamber_lengths);
  void reset_straight();
  void set_load_mass(double grams);
  void set_load(const arm::Wrench& wrench);

  /// One simulator step of params().sim_dt with the given pressures.
  void tick(const arm::ChamberVec& pressures);

  /// Spring lengths as read by the sensors (mm).
  [[nodiscard]] arm::ChamberVec spring_lengths() const;
  /// Sensor frequencies corresponding to spring_lengths() (Hz).
  [[nodiscard]] arm::ChamberVec sensor_frequencies() const;
  /// Pose predicted by the nominal model from the sensed geometry.
  [[nodiscard]] arm::Pose6D model_pose() const;
  /// Pose of the (possibly perturbed) physical arm. Draws noise.
  arm::Pose6D true_pose();
  /// Chamber geometry of the physical arm (sensed geometry plus bias).
  [[nodiscard]] arm::ChamberVec true_chamber_lengths() const;

  /// Extreme spring lengths reachable inside the chamber box.
  [[nodiscard]] std::pair<double, double> spring_bounds() const;

 private:
  arm::ArmParams params_;
  arm::ArmParams dynamics_params_;
  sensor::SensorModel sensor_;
  RealityPerturbation perturbation_;
  arm::ArmState state_;
  std::mt19937_64 noise_rng_;
  double time_ = 0.0;
};

}  // namespace ssilkc::control
