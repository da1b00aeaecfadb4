#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "control/pid.hpp"
#include "control/sensor_env.hpp"
#include "rl/replay_buffer.hpp"
#include "rl/tqc.hpp"

namespace ssilkc::rl {

/// Pose the agent observes for the current arm state (model pose, or the
/// model pose passed through the S2R network).
using PoseObserver = std::function<Pose6D(control::ArmEnv&)>;

PoseObserver model_pose_observer();

/// One RL environment step: decode the frequency action into spring
/// setpoints, track them with the PID loop, observe the new pose.
struct StepResult {
  Pose6D pose;
  bool saturated = false;
  bool settled = false;
};

StepResult sensor_space_step(control::ArmEnv& env, const ChamberVec& frequencies, const control::PIDConfig& pid,
                             const PoseObserver& observe, const control::TickObserver& tick_observer = {});

struct TrainOptions {
  long total_steps = 10000;           // environment steps across all workers
  long learning_starts = 1000;        // uniform random actions before this many steps
  int updates_per_step = 1;
  double random_start_prob = 0.5;     // episodes starting from a random configuration
  bool relabel = true;                // hindsight copy per transition
  bool terminate_on_saturation = true;
  bool parallel_rollouts = false;     // one thread per worker
  int log_window = 50;                // episodes per goal for success rates
};

/// Per-episode record: {step, goal_id, success, critic_loss, actor_loss, entropy_coef}.
struct EpisodeRecord {
  long step = 0;
  int goal_id = -1;
  bool success = false;
  double critic_loss = 0;
  double actor_loss = 0;
  double entropy_coef = 0;
  double final_error_norm = 0;
};

struct TrainingLog {
  std::vector<EpisodeRecord> episodes;
  void write_jsonl(std::ostream& out) const;
  /// Success rate of the last `window` episodes of each goal, averaged over goals.
  [[nodiscard]] double recent_success_rate(int window) const;
};

/// Optional hooks that replace the analytic reward (GAIL) and run extra work
/// after each learner update.
struct RewardHooks {
  /// Reward for a freshly collected (or relabeled) transition. Null: analytic.
  std::function<double(const Transition&)> reward;
  /// Recompute rewards of a sampled batch before the TQC update. Null: stored rewards.
  std::function<void(std::vector<Transition>&)> batch_rewards;
  /// Called after every learner update with the running step count.
  std::function<void(long step, ReplayBuffer& buffer)> after_update;
};

struct TrainingSetup {
  RLConfig rl;
  TQCConfig tqc;
  TrainOptions options;
  control::PIDConfig pid;
  arm::ArmParams arm = arm::calibrated_params();
  sensor::SensorModel sensor;
  PoseObserver observe = model_pose_observer();
  WorkspaceBounds start_bounds = WorkspaceBounds::full(arm::calibrated_params());
  std::uint64_t seed = 0;
};

/// Collects experience on `goals` with `rl.workers` private environments and
/// trains `agent`. Can be called repeatedly on the same agent and buffer to
/// run multi-phase schedules; `step_offset` continues the step counter.
struct TrainResult {
  long steps = 0;
  long episodes = 0;
};

TrainResult train_multigoal(const TrainingSetup& setup, const std::vector<Pose6D>& goals, TQCAgent& agent,
                            ReplayBuffer& buffer, TrainingLog& log, const RewardHooks& hooks = {},
                            long step_offset = 0);

}  // namespace ssilkc::rl
