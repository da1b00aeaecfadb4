#pragma once

#include <functional>

#include "control/sensor_env.hpp"
#include "control/trajectory_log.hpp"

namespace ssilkc::control {

/// Discrete sensor-space PID. Gains act per control tick: the integral sums
/// errors tick by tick and the derivative is the per-tick error change.
struct PIDConfig {
  double kp = 2.0;   // kPa per mm
  double ki = 0.2;   // kPa per mm*tick
  double kd = 0.05;  // kPa per mm/tick
  double integral_clamp = 60.0;  // kPa, bound on |ki * integral|
  double settle_tolerance = 0.5;  // mm
  int settle_budget = 200;        // ticks

  void validate() const;
};

struct PidResult {
  bool settled = false;
  int ticks = 0;
  double final_max_error = 0;  // mm
  bool saturated_at_end = false;
  double max_integral_term = 0;  // kPa, largest |ki * integral| seen
  arm::ChamberVec final_pressures{};
};

/// Incremental form of the tracking loop, for callers that interleave ticks
/// with other work. `retarget` captures the current pressures as the bias and
/// clears the integral and derivative memory.
class PidController {
 public:
  explicit PidController(PIDConfig cfg = {});

  void retarget(const ArmEnv& env, const arm::ChamberVec& reference);
  [[nodiscard]] const arm::ChamberVec& reference() const { return reference_; }
  /// Largest |reference - spring| at the current state.
  [[nodiscard]] double max_error(const ArmEnv& env) const;
  /// One control tick: computes and applies the clamped pressure command.
  void tick(ArmEnv& env);
  [[nodiscard]] double max_integral_term() const { return max_integral_term_; }

 private:
  PIDConfig cfg_;
  arm::ChamberVec reference_{};
  arm::ChamberVec bias_{};
  arm::ChamberVec integral_{};
  arm::ChamberVec previous_{};
  bool first_ = true;
  double max_integral_term_ = 0;
};

/// Throws std::domain_error when a reference leaves the spring bounds.
void check_reference(const ArmEnv& env, const arm::ChamberVec& reference);

/// Called after every tick with the environment; lets callers log or check.
using TickObserver = std::function<void(ArmEnv&)>;

/// Drives the spring lengths toward `reference` (mm) until every error is
/// below tolerance or the budget runs out. Pressure commands are clamped to
/// the actuator range with conditional-integration anti-windup.
PidResult pid_track(ArmEnv& env, const arm::ChamberVec& reference, const PIDConfig& cfg,
                    const TickObserver& observer = {});

}  // namespace ssilkc::control
