#include "control/sensor_env.hpp"

#include <algorithm>

namespace ssilkc::control {

bool RealityPerturbation::is_identity() const {
  return stiffness_scale == 1.0 && pose_noise_sigma == 0.0 &&
         std::all_of(length_bias.begin(), length_bias.end(), [](double b) { return b == 0.0; });
}

RealityPerturbation RealityPerturbation::default_gap() {
  RealityPerturbation p;
  p.stiffness_scale = 1.1;
  for (std::size_t i = 0; i < p.length_bias.size(); ++i) p.length_bias[i] = (i % 2 == 0) ? 2.0 : -2.0;
  p.pose_noise_sigma = 1.0;
  return p;
}

ArmEnv::ArmEnv(arm::ArmParams params, sensor::SensorModel sensor, RealityPerturbation perturbation,
               std::uint64_t noise_seed)
    : params_(params),
      dynamics_params_(params),
      sensor_(std::move(sensor)),
      perturbation_(perturbation),
      noise_rng_(noise_seed) {
  params_.validate();
  dynamics_params_.chamber_stiffness *= perturbation_.stiffness_scale;
  reset_straight();
}

void ArmEnv::reset(const arm::ChamberVec& lengths) {
  const arm::Wrench load = state_.load_wrench;
  state_ = arm::rest_state(lengths, params_);
  state_.load_wrench = load;
  time_ = 0.0;
}

void ArmEnv::reset_straight() {
  arm::ChamberVec l{};
  l.fill(params_.chamber_free_length);
  reset(l);
}

void ArmEnv::set_load_mass(double grams) { state_.load_wrench = arm::mass_load(grams); }

void ArmEnv::set_load(const arm::Wrench& wrench) { state_.load_wrench = wrench; }

void ArmEnv::tick(const arm::ChamberVec& pressures) {
  state_ = arm::step(state_, pressures, params_.sim_dt, dynamics_params_);
  time_ += params_.sim_dt;
}

arm::ChamberVec ArmEnv::spring_lengths() const { return arm::spring_lengths(state_.chamber_lengths, params_); }

arm::ChamberVec ArmEnv::sensor_frequencies() const { return sensor_.map_inverse(spring_lengths()); }

arm::Pose6D ArmEnv::model_pose() const { return arm::forward_kinematics(state_.chamber_lengths, params_); }

arm::ChamberVec ArmEnv::true_chamber_lengths() const {
  arm::ChamberVec l = state_.chamber_lengths;
  for (std::size_t i = 0; i < l.size(); ++i)
    l[i] = std::clamp(l[i] + perturbation_.length_bias[i], params_.chamber_min, params_.chamber_max);
  return l;
}

arm::Pose6D ArmEnv::true_pose() {
  if (perturbation_.is_identity()) return model_pose();
  arm::Pose6D p = arm::forward_kinematics(true_chamber_lengths(), params_);
  if (perturbation_.pose_noise_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, perturbation_.pose_noise_sigma);
    p.x += n(noise_rng_);
    p.y += n(noise_rng_);
    p.z += n(noise_rng_);
  }
  return p;
}

std::pair<double, double> ArmEnv::spring_bounds() const {
  const double a = params_.chamber_min;
  const double b = params_.chamber_max;
  const double ratio = params_.spring_anchor_radius / params_.chamber_offset_radius;
  const double mean_low = (a + 2.0 * b) / 3.0;
  const double mean_high = (2.0 * a + b) / 3.0;
  return {std::min(a, mean_low + ratio * (a - mean_low)), std::max(b, mean_high + ratio * (b - mean_high))};
}

}  // namespace ssilkc::control
