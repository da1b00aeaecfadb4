#pragma once

#include <map>
#include <string>
#include <vector>

#include "control/deploy.hpp"
#include "harness/config.hpp"
#include "json.hpp"

namespace ssilkc::harness {

/// Circle of poses with a vertical tip axis, solved by IK so every pose is
/// reachable; point k sits at angle 2*pi*k/n from +X.
std::vector<arm::Pose6D> circle_goals(const CircleConfig& c, int n, const arm::ArmParams& params);

/// (step, quotas) rows; an empty quota map means uniform over present goals.
struct QuotaSchedule {
  std::vector<std::pair<long, std::map<int, double>>> rows;
};
/// Lines: `<step> uniform` or `<step> <goal>:<share> ...`; `#` comments.
QuotaSchedule parse_schedule(std::istream& in);
QuotaSchedule load_schedule(const std::string& path);

/// train_multigoal split at the schedule's steps, rebalancing the buffer at
/// each boundary that falls inside [step_offset, step_offset + steps).
rl::TrainResult train_scheduled(const rl::TrainingSetup& setup, const std::vector<arm::Pose6D>& goals,
                                rl::TQCAgent& agent, rl::ReplayBuffer& buffer, rl::TrainingLog& log,
                                const rl::RewardHooks& hooks, long step_offset, const QuotaSchedule& schedule,
                                std::uint64_t seed);

rl::TrainingSetup make_setup(const ExperimentConfig& cfg);

struct CirclePolicy {
  rl::Policy policy;
  rl::TrainingLog log;
  double phase1_success = 0;
  double phase2_success = 0;
};

/// Two-phase schedule: every phase1_stride-th circle point, then all points
/// with a retained fraction of the phase-1 buffer.
CirclePolicy train_circle_policy(const ExperimentConfig& cfg, const rl::PoseObserver& observe, std::uint64_t seed);

control::PathMetrics eval_circle(const ExperimentConfig& cfg, const rl::Policy& policy, const s2r::S2RModel* s2r,
                                 control::ArmEnv& env);

nlohmann::json path_metrics_json(const control::PathMetrics& m);

/// Success of sequential deployment over `goals` inside `scene`: a goal
/// counts when it is reached and no post-step configuration collides.
struct SceneEval {
  double success_rate = 0;
  std::size_t reached = 0;
  std::size_t collisions = 0;
  bool successful_rollouts_collision_free = true;
  double worst_clearance = 0;
  std::vector<bool> success;
};
SceneEval eval_in_scene(const rl::Policy& policy, const std::vector<arm::Pose6D>& goals, const arm::PipeScene& scene,
                        const ExperimentConfig& cfg);

/// Oracle demonstrations through a cross pipe of the given diameter.
std::vector<gail::DemoRecord> oracle_demos(const ExperimentConfig& cfg, double diameter);
/// Reached waypoint poses of a demo, in order, without the start record.
std::vector<arm::Pose6D> demo_goals(const std::vector<gail::DemoRecord>& records);

nlohmann::json run_workspace(const ExperimentConfig& cfg);
nlohmann::json run_train_circle(const ExperimentConfig& cfg);
nlohmann::json run_train_s2r(const ExperimentConfig& cfg);
nlohmann::json run_record_demo(const ExperimentConfig& cfg);
nlohmann::json run_pickplace(const ExperimentConfig& cfg);
nlohmann::json run_eval_path(const ExperimentConfig& cfg);
/// GAIL training on the oracle demos once per penalty weight; reports the
/// mean |D - 0.5| over discriminator updates [window_begin, window_end).
nlohmann::json run_gp_ablation(const ExperimentConfig& cfg, const std::vector<double>& weights = {20.0, 0.0},
                               int window_begin = 100, int window_end = 500);

/// Runs a command by name, writing <out>/config.json (resolved) and
/// <out>/metrics.json. Returns the metrics.
nlohmann::json run_command(const std::string& name, const ExperimentConfig& cfg);

}  // namespace ssilkc::harness
