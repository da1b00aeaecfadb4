#include <cmath>

#include "doctest.h"

#include "control/pid.hpp"
#include "control/trajectory_log.hpp"

using namespace ssilkc;
using namespace ssilkc::control;

namespace {

arm::ChamberVec filled(double v) {
  arm::ChamberVec a{};
  a.fill(v);
  return a;
}

}  // namespace

TEST_CASE("reference equal to the current springs settles at once") {
  ArmEnv env;
  const auto start = env.spring_lengths();
  const auto res = pid_track(env, start, PIDConfig{});
  CHECK(res.settled);
  CHECK(res.ticks == 0);
  CHECK(res.final_pressures == env.state().pressures);
}

TEST_CASE("straightening a bent arm") {
  ArmEnv env;
  env.reset({120, 230, 200, 150, 220, 180, 200, 130, 210});
  const auto res = pid_track(env, filled(200.0), PIDConfig{});
  CHECK(res.settled);
  CHECK(res.ticks <= 200);
  CHECK(res.final_max_error < 0.5);
  for (double l : env.spring_lengths()) CHECK(std::abs(l - 200.0) < 0.5);
}

TEST_CASE("tip load changes pressures but not settled springs") {
  const arm::ChamberVec target{190, 205, 215, 195, 200, 210, 185, 210, 205};
  std::vector<arm::ChamberVec> springs, pressures;
  for (double grams : {0.0, 250.0, 500.0}) {
    ArmEnv env;
    env.set_load_mass(grams);
    const auto res = pid_track(env, target, PIDConfig{});
    REQUIRE(res.settled);
    springs.push_back(env.spring_lengths());
    pressures.push_back(res.final_pressures);
  }
  double max_dp = 0.0;
  for (std::size_t k = 1; k < springs.size(); ++k) {
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(std::abs(springs[k][i] - springs[0][i]) < 0.5);
      max_dp = std::max(max_dp, std::abs(pressures[k][i] - pressures[0][i]));
    }
  }
  CHECK(max_dp > 1.0);
}

TEST_CASE("commands stay inside the pressure range and the integral stays clamped") {
  ArmEnv env;
  PIDConfig cfg;
  cfg.integral_clamp = 15.0;
  cfg.settle_budget = 150;
  env.set_load_mass(2000.0);
  const auto [lo, hi] = env.spring_bounds();
  bool in_range = true;
  const auto res = pid_track(env, filled(hi - 1.0), cfg, [&](ArmEnv& e) {
    for (double p : e.state().pressures) in_range = in_range && p >= -40.0 && p <= 20.0;
  });
  CHECK(in_range);
  CHECK(res.max_integral_term <= 15.0 + 1e-12);
  CHECK_THROWS_AS(pid_track(env, filled(hi + 1.0), cfg), std::domain_error);
  (void)lo;
}

TEST_CASE("PD variant and config validation") {
  ArmEnv env;
  PIDConfig pd;
  pd.ki = 0.0;
  env.reset({200, 200, 200, 200, 200, 200, 150, 150, 150});
  double initial = 0.0;
  for (double l : env.spring_lengths()) initial = std::max(initial, std::abs(190.0 - l));
  // Without integral action a steady-state offset remains, but it must shrink.
  const auto res = pid_track(env, filled(190.0), pd);
  CHECK(res.final_max_error < 0.25 * initial);
  PIDConfig bad;
  bad.kp = -1;
  CHECK_THROWS(bad.validate());
  bad = PIDConfig{};
  bad.settle_tolerance = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("identical runs produce identical logs") {
  auto run = [] {
    ArmEnv env(arm::calibrated_params(), sensor::SensorModel{}, RealityPerturbation::default_gap(), 5);
    TrajectoryLog log;
    pid_track(env, {190, 205, 215, 195, 200, 210, 185, 210, 205}, PIDConfig{}, [&](ArmEnv& e) {
      TrajectorySample s;
      s.t = e.time();
      s.pose = e.true_pose();
      s.spring_lengths = e.spring_lengths();
      s.pressures = e.state().pressures;
      log.append(s);
    });
    return log.to_csv();
  };
  CHECK(run() == run());
}

TEST_CASE("trajectory log requires increasing time") {
  TrajectoryLog log;
  TrajectorySample s;
  s.t = 0.03;
  log.append(s);
  CHECK_THROWS(log.append(s));
  const std::string csv = log.to_csv();
  CHECK(csv.find("t_s") != std::string::npos);
}
