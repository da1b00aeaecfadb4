#include "control/pid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ssilkc::control {

void PIDConfig::validate() const {
  if (kp < 0 || ki < 0 || kd < 0) throw std::invalid_argument("PIDConfig: gains must be non-negative");
  if (!(settle_tolerance > 0)) throw std::invalid_argument("PIDConfig: tolerance must be positive");
  if (settle_budget < 0) throw std::invalid_argument("PIDConfig: budget must be non-negative");
  if (!(integral_clamp >= 0)) throw std::invalid_argument("PIDConfig: integral clamp must be non-negative");
}

void check_reference(const ArmEnv& env, const arm::ChamberVec& reference) {
  const auto [lo, hi] = env.spring_bounds();
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (!(reference[i] >= lo && reference[i] <= hi))
      throw std::domain_error("spring reference " + std::to_string(i) + " = " + std::to_string(reference[i]) +
                              " mm outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

PidController::PidController(PIDConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void PidController::retarget(const ArmEnv& env, const arm::ChamberVec& reference) {
  check_reference(env, reference);
  reference_ = reference;
  bias_ = env.state().pressures;
  integral_ = {};
  previous_ = {};
  first_ = true;
}

double PidController::max_error(const ArmEnv& env) const {
  const arm::ChamberVec springs = env.spring_lengths();
  double worst = 0.0;
  for (std::size_t i = 0; i < springs.size(); ++i) worst = std::max(worst, std::abs(reference_[i] - springs[i]));
  return worst;
}

void PidController::tick(ArmEnv& env) {
  const auto& p = env.params();
  const arm::ChamberVec springs = env.spring_lengths();
  arm::ChamberVec command{};
  arm::ChamberVec err{};
  for (std::size_t i = 0; i < err.size(); ++i) {
    err[i] = reference_[i] - springs[i];
    const double derivative = first_ ? 0.0 : err[i] - previous_[i];
    const double candidate_integral = integral_[i] + err[i];
    double i_term = std::clamp(cfg_.ki * candidate_integral, -cfg_.integral_clamp, cfg_.integral_clamp);
    const double unclamped = bias_[i] + cfg_.kp * err[i] + i_term + cfg_.kd * derivative;
    const double clamped = std::clamp(unclamped, p.pressure_min, p.pressure_max);
    // Integrate only while the actuator is not pushed further into its limit.
    const bool winding = (unclamped != clamped) && ((unclamped > clamped) == (err[i] > 0));
    if (!winding) {
      integral_[i] = cfg_.ki > 0 ? i_term / cfg_.ki : 0.0;
    } else {
      i_term = std::clamp(cfg_.ki * integral_[i], -cfg_.integral_clamp, cfg_.integral_clamp);
    }
    max_integral_term_ = std::max(max_integral_term_, std::abs(i_term));
    command[i] =
        std::clamp(bias_[i] + cfg_.kp * err[i] + i_term + cfg_.kd * derivative, p.pressure_min, p.pressure_max);
  }
  previous_ = err;
  first_ = false;
  env.tick(command);
}

PidResult pid_track(ArmEnv& env, const arm::ChamberVec& reference, const PIDConfig& cfg,
                    const TickObserver& observer) {
  PidController pid(cfg);
  pid.retarget(env, reference);
  PidResult res;
  for (int tick = 0;; ++tick) {
    const double worst = pid.max_error(env);
    res.final_max_error = worst;
    res.ticks = tick;
    if (worst < cfg.settle_tolerance) {
      res.settled = true;
      break;
    }
    if (tick >= cfg.settle_budget) break;
    pid.tick(env);
    if (observer) observer(env);
  }
  res.max_integral_term = pid.max_integral_term();
  res.saturated_at_end = env.state().any_saturated();
  res.final_pressures = env.state().pressures;
  return res;
}

}  // namespace ssilkc::control
