#include "control/deploy.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ssilkc::control {

arm::Pose6D observe_pose(const ArmEnv& env, const s2r::S2RModel* s2r) {
  const arm::Pose6D p = env.model_pose();
  return s2r ? s2r::apply_s2r(*s2r, p, env.spring_lengths()) : p;
}

DeployResult deploy_policy(const rl::Policy& policy, const s2r::S2RModel* s2r, const arm::Pose6D& goal, ArmEnv& env,
                           const DeployConfig& cfg) {
  cfg.rl.validate();
  cfg.pid.validate();
  DeployResult out;
  out.worst_clearance = std::numeric_limits<double>::infinity();
  std::mt19937_64 unused(0);
  auto record = [&](ArmEnv& e) {
    TrajectorySample s;
    s.t = e.time();
    s.pose = observe_pose(e, s2r);
    s.spring_lengths = e.spring_lengths();
    s.f_sensor = e.sensor_frequencies();
    s.pressures = e.state().pressures;
    s.saturation_flags = e.state().saturation_flags;
    s.goal = goal;
    s.scaled_error_norm = rl::build_state(s.pose, goal, cfg.rl).error_norm();
    if (out.log.empty() || s.t > out.log.samples().back().t) out.log.append(s);
  };

  out.observed = observe_pose(env, s2r);
  for (;;) {
    const rl::RLState state = rl::build_state(out.observed, goal, cfg.rl);
    if (state.error_norm() < cfg.rl.threshold) {
      out.success = true;
      break;
    }
    if (out.steps >= cfg.max_steps) {
      out.failure = "step budget exhausted";
      break;
    }
    const arm::ChamberVec freqs = rl::act(policy, state, true, unused);
    const PidResult r = pid_track(env, env.sensor().map(freqs), cfg.pid, record);
    ++out.steps;
    out.observed = observe_pose(env, s2r);
    if (cfg.scene) {
      const auto rep = arm::collision_check(env.true_chamber_lengths(), *cfg.scene, env.params());
      out.worst_clearance = std::min(out.worst_clearance, rep.worst_clearance);
      out.collided = out.collided || rep.collides;
    }
    (void)r;
  }
  out.measured = env.true_pose();
  out.translation_error = out.measured.translation_distance(goal);
  return out;
}

std::size_t PathMetrics::success_count() const {
  std::size_t n = 0;
  for (bool s : success) n += s ? 1 : 0;
  return n;
}

std::string PathMetrics::summary() const {
  std::ostringstream os;
  os << "waypoints " << success.size() << "\n"
     << "rmse_translation_mm " << rmse_translation << "\n"
     << "mean_abs_yaw_deg " << mean_abs_yaw << "\n"
     << "mean_abs_pitch_deg " << mean_abs_pitch << "\n"
     << "mean_abs_roll_deg " << mean_abs_roll << "\n"
     << "successes " << success_count() << "\n"
     << "collisions " << collisions << "\n";
  return os.str();
}

PathMetrics path_follow(const rl::Policy& policy, const s2r::S2RModel* s2r, const std::vector<arm::Pose6D>& waypoints,
                        ArmEnv& env, const DeployConfig& cfg) {
  if (waypoints.size() < 2) throw std::invalid_argument("path_follow: need at least two waypoints");
  PathMetrics m;
  double se = 0.0;
  for (const auto& w : waypoints) {
    DeployResult r = deploy_policy(policy, s2r, w, env, cfg);
    const double e = r.translation_error;
    se += e * e;
    const auto d = rl::pose_difference(r.measured, w);
    m.mean_abs_yaw += std::abs(d[3]);
    m.mean_abs_pitch += std::abs(d[4]);
    m.mean_abs_roll += std::abs(d[5]);
    m.success.push_back(r.success);
    m.translation_errors.push_back(e);
    m.collisions += r.collided ? 1 : 0;
    for (const auto& s : r.log.samples())
      if (m.log.empty() || s.t > m.log.samples().back().t) m.log.append(s);
  }
  const double n = static_cast<double>(waypoints.size());
  m.rmse_translation = std::sqrt(se / n);
  m.mean_abs_yaw /= n;
  m.mean_abs_pitch /= n;
  m.mean_abs_roll /= n;
  return m;
}

}  // namespace ssilkc::control
