#include "gail/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "arm/ik.hpp"

namespace ssilkc::gail {

OracleCollision::OracleCollision(std::size_t index, double c)
    : std::runtime_error("oracle path collides on the way to waypoint " + std::to_string(index) + " (clearance " +
                         std::to_string(c) + " mm)"),
      waypoint_index(index),
      clearance(c) {}

DemoRecord snapshot_record(const control::ArmEnv& env, const Pose6D& goal, const std::string& scene_id,
                           const std::string& source, int sequence) {
  DemoRecord r;
  r.t = env.time();
  r.chamber_lengths = env.state().chamber_lengths;
  r.spring_lengths = env.spring_lengths();
  r.f_sensor = env.sensor_frequencies();
  r.pose = env.model_pose();
  r.goal = goal;
  r.scene_id = scene_id;
  r.source = source;
  r.sequence = sequence;
  return r;
}

std::vector<DemoRecord> record_oracle_demo(const std::vector<OracleWaypoint>& waypoints, const arm::PipeScene& scene,
                                           const OracleOptions& opt, int sequence) {
  if (waypoints.empty()) throw std::invalid_argument("record_oracle_demo: oracle mode needs waypoints");
  if (!(opt.max_tip_step > 0)) throw std::invalid_argument("record_oracle_demo: step must be positive");
  scene.validate();
  control::ArmEnv env(opt.arm);
  std::vector<DemoRecord> out;
  double clock = 0.0;
  auto emit = [&](const Pose6D& goal) {
    DemoRecord r = snapshot_record(env, goal, scene.id, "scripted-oracle", sequence);
    r.t = clock;
    out.push_back(r);
  };
  emit(env.model_pose());
  arm::ChamberVec springs = env.spring_lengths();
  for (std::size_t w = 0; w < waypoints.size(); ++w) {
    const auto& wp = waypoints[w];
    const Eigen::Vector3d from = env.model_pose().position();
    const double dist = (wp.position - from).norm();
    const int n_steps = std::max(1, static_cast<int>(std::ceil(dist / opt.max_tip_step)));
    for (int k = 1; k <= n_steps; ++k) {
      const Eigen::Vector3d target = from + (wp.position - from) * (static_cast<double>(k) / n_steps);
      arm::IkOptions ik;
      ik.tip_axis = wp.tip_axis;
      if (wp.tip_axis) ik.axis_weight = 200.0 * static_cast<double>(k) / n_steps;
      const arm::IkResult sol = arm::solve_ik(target, springs, opt.arm, ik);
      const auto rep = arm::collision_check(sol.chamber_lengths, scene, opt.arm, opt.collision_samples);
      if (rep.collides) throw OracleCollision(w, rep.worst_clearance);
      const auto r = control::pid_track(env, sol.springs, opt.pid);
      clock += r.ticks * opt.arm.sim_dt;
      springs = sol.springs;
      const auto after = arm::collision_check(env.state().chamber_lengths, scene, opt.arm, opt.collision_samples);
      if (after.collides) throw OracleCollision(w, after.worst_clearance);
    }
    const Pose6D reached = env.model_pose();
    if ((reached.position() - wp.position).norm() > opt.reach_tolerance)
      throw std::runtime_error("record_oracle_demo: waypoint " + std::to_string(w) + " not reached");
    clock += opt.arm.sim_dt;
    emit(reached);
  }
  return out;
}

std::vector<OracleWaypoint> cross_pipe_route(double diameter, double cross_height) {
  // Reach into each branch, staying well inside the pipe radius.
  const double reach = std::min(210.0, 0.7 * diameter);
  const double z = cross_height + 20.0;
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  std::vector<OracleWaypoint> route;
  route.push_back({Eigen::Vector3d(0, 0, 560), up});
  for (double side : {1.0, -1.0}) {
    route.push_back({Eigen::Vector3d(0, 0, 520), up});
    for (double f : {0.25, 0.5, 0.75, 1.0}) route.push_back({Eigen::Vector3d(side * f * reach, 0, z), std::nullopt});
    route.push_back({Eigen::Vector3d(side * reach, 0, z - 20.0), std::nullopt});
    for (double f : {0.75, 0.5, 0.25}) route.push_back({Eigen::Vector3d(side * f * reach, 0, z), std::nullopt});
  }
  route.push_back({Eigen::Vector3d(0, 0, 520), up});
  return route;
}

}  // namespace ssilkc::gail
