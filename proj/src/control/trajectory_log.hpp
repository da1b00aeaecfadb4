#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "arm/arm_sim.hpp"

namespace ssilkc::control {

struct TrajectorySample {
  double t = 0;  // s
  arm::Pose6D pose;
  arm::ChamberVec spring_lengths{};
  arm::ChamberVec f_sensor{};
  arm::ChamberVec pressures{};
  std::array<bool, arm::kChambers> saturation_flags{};
  arm::Pose6D goal;
  double scaled_error_norm = 0;
};

/// Append-only time series of one control loop.
class TrajectoryLog {
 public:
  /// Appends a sample; t must be strictly greater than the previous one.
  void append(const TrajectorySample& sample);
  [[nodiscard]] const std::vector<TrajectorySample>& samples() const { return samples_; }
  [[nodiscard]] bool empty() const { return samples_.empty(); }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }

  /// Comma-separated table; the header names every column with its unit.
  void write_csv(std::ostream& out) const;
  [[nodiscard]] std::string to_csv() const;

 private:
  std::vector<TrajectorySample> samples_;
};

}  // namespace ssilkc::control
