#include "sensor/sensor_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ssilkc::sensor {

namespace {

double omega_sq(double f) {
  const double w = 2.0 * std::numbers::pi * f;
  return w * w;
}

}  // namespace

void SensorParams::validate() const {
  if (!(capacitance > 0)) throw std::invalid_argument("SensorParams: capacitance must be positive");
  if (!(beta > 0)) throw std::invalid_argument("SensorParams: beta must be positive");
  if (!(k_composite > 0)) throw std::invalid_argument("SensorParams: composite coefficient must be positive");
  if (!(i_comp >= 0)) throw std::invalid_argument("SensorParams: i_comp must be non-negative");
}

double SensorParams::n_turns() const {
  return std::sqrt(k_composite / (mu0 * mu_p * std::numbers::pi * r_p * r_p * capacitance));
}

SensorParams default_sensor_params(double nominal_length, double band_fraction) {
  SensorParams p;
  const double f_res = 1.0 / (2.0 * std::numbers::pi * std::sqrt(p.capacitance * p.i_comp));
  const double w2 = omega_sq(band_fraction * f_res);
  p.k_composite = nominal_length * (1.0 - p.capacitance * p.i_comp * w2) / w2;
  return p;
}

SensorModel::SensorModel(SensorParams params) : params_(params) {
  params_.validate();
  band_.lo = 0.0;
  band_.hi = params_.i_comp > 0
                 ? 1.0 / (2.0 * std::numbers::pi * std::sqrt(params_.capacitance * params_.i_comp))
                 : std::numeric_limits<double>::infinity();
}

double SensorModel::inductance_from_frequency(double f) const {
  // Closed at the resonance point, where the inductance is exactly zero.
  if (!(f > band_.lo && f <= band_.hi))
    throw std::domain_error("frequency " + std::to_string(f) + " Hz outside the sensor band");
  return 1.0 / (params_.capacitance * omega_sq(f)) - params_.i_comp;
}

double SensorModel::frequency_to_length(double f) const {
  if (!(f > 0)) throw std::domain_error("frequency must be positive");
  const double w2 = omega_sq(f);
  const double denom = 1.0 - params_.capacitance * params_.i_comp * w2;
  if (!(denom > 0)) throw std::domain_error("frequency beyond sensor band");
  return params_.k_composite * w2 / denom;
}

double SensorModel::length_to_frequency(double l) const {
  if (!(l > 0)) throw std::domain_error("spring length must be positive");
  const double w2 = l / (params_.k_composite + l * params_.capacitance * params_.i_comp);
  return std::sqrt(w2) / (2.0 * std::numbers::pi);
}

double SensorModel::map(double f) const { return params_.beta * frequency_to_length(f) + params_.delta; }

double SensorModel::map_inverse(double spring_length) const {
  const double raw = (spring_length - params_.delta) / params_.beta;
  if (!(raw > 0)) throw std::domain_error("spring length below the sensor offset");
  return length_to_frequency(raw);
}

arm::ChamberVec SensorModel::map(std::span<const double> f) const {
  if (f.size() != arm::kChambers) throw std::invalid_argument("f_map: expected 9 frequencies");
  arm::ChamberVec out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = map(f[i]);
  return out;
}

arm::ChamberVec SensorModel::map_inverse(std::span<const double> l) const {
  if (l.size() != arm::kChambers) throw std::invalid_argument("f_map inverse: expected 9 lengths");
  arm::ChamberVec out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = map_inverse(l[i]);
  return out;
}

FrequencyBand SensorModel::action_band(double min_length, double max_length) const {
  if (!(min_length < max_length)) throw std::invalid_argument("action_band: empty length range");
  return {map_inverse(min_length), map_inverse(max_length)};
}

}  // namespace ssilkc::sensor
