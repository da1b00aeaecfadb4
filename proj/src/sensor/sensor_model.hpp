#pragma once

#include <array>
#include <span>

#include "arm/arm_sim.hpp"

namespace ssilkc::sensor {

/// Constants of the resonant spring sensor. SI units except r_p (mm).
///
/// `i_comp` keeps the published offset value (1000e-12) as a plain number;
/// the published unit is a capacitance although the term offsets an
/// inductance.
struct SensorParams {
  double capacitance = 100e-12;  // F
  double i_comp = 1000e-12;
  double mu0 = 1.26e-6;
  double mu_p = 1.0;
  double r_p = 2.0;  // mm
  double beta = 0.93;
  double delta = 2.45;  // mm
  /// mu0 * N^2 * pi * r_p^2 * C, in mm*s^2 so that l = K*w^2/(1-C*I*w^2) is in mm.
  double k_composite = 0.0;

  void validate() const;
  /// Turn count implied by k_composite (informational only).
  [[nodiscard]] double n_turns() const;
};

/// Defaults with K chosen so a raw length of `nominal_length` sits at
/// `band_fraction` of the upper band edge.
SensorParams default_sensor_params(double nominal_length = 200.0, double band_fraction = 0.5);

struct FrequencyBand {
  double lo = 0;  // Hz, exclusive
  double hi = 0;  // Hz, exclusive
  [[nodiscard]] bool contains(double f) const { return f > lo && f < hi; }
};

class SensorModel {
 public:
  explicit SensorModel(SensorParams params = default_sensor_params());

  [[nodiscard]] const SensorParams& params() const { return params_; }
  /// Frequencies for which the length relation's denominator stays positive.
  [[nodiscard]] FrequencyBand valid_band() const { return band_; }
  /// Frequency where the resonant inductance reaches zero (upper band edge).
  [[nodiscard]] double resonance_frequency() const { return band_.hi; }

  [[nodiscard]] double inductance_from_frequency(double f) const;
  /// Raw (beta/delta-free) spring length in mm.
  [[nodiscard]] double frequency_to_length(double f) const;
  [[nodiscard]] double length_to_frequency(double length_mm) const;

  /// Simulation spring length from a sensor frequency.
  [[nodiscard]] double map(double f) const;
  [[nodiscard]] double map_inverse(double spring_length_mm) const;
  [[nodiscard]] arm::ChamberVec map(std::span<const double> frequencies) const;
  [[nodiscard]] arm::ChamberVec map_inverse(std::span<const double> spring_lengths) const;

  /// Frequency band whose mapped spring lengths span [min_length, max_length].
  [[nodiscard]] FrequencyBand action_band(double min_length, double max_length) const;

 private:
  SensorParams params_;
  FrequencyBand band_;
};

}  // namespace ssilkc::sensor
