#pragma once

#include <cstdint>
#include <string>

#include "control/pid.hpp"
#include "control/sensor_env.hpp"
#include "gail/discriminator.hpp"
#include "json.hpp"
#include "rl/rl_types.hpp"
#include "rl/tqc.hpp"
#include "rl/trainer.hpp"
#include "s2r/s2r.hpp"
#include "teleop/session.hpp"

namespace ssilkc::harness {

struct CircleConfig {
  double radius = 80.0;     // mm
  double center_z = 560.0;  // mm
  int train_points = 16;
  int phase1_stride = 2;  // phase 1 trains on every n-th point
  int eval_points = 40;
  long phase1_steps = 10000;
  long phase2_steps = 20000;
  double retain_fraction = 0.2;
  bool ablation_s2r = false;  // also run the with/without S2R comparison
};

struct S2RSection {
  std::size_t samples = 2000;
  s2r::S2RConfig train;
  control::RealityPerturbation perturbation = control::RealityPerturbation::default_gap();
};

struct PickPlaceConfig {
  double diameter = 300.0;
  double reuse_diameter = 250.0;
  double cross_height = 420.0;
  long steps = 60000;
  long reuse_steps = 20000;
  int eval_every = 10000;  // steps between success-curve points
  int updates_per_step = 1;  // replaces train.updates_per_step for this command
  std::string demo;        // demo file; empty means <out>/demo.jsonl
  bool run_baseline = true;
  bool run_reuse = true;
};

struct RecordDemoConfig {
  std::string mode = "oracle";  // oracle | teleop
  double diameter = 300.0;
  int passes = 1;
};

inline gail::GailConfig harness_gail_defaults() {
  gail::GailConfig g;
  g.mode = gail::RewardMode::RecomputeOnSample;
  return g;
}

inline rl::TrainOptions circle_train_defaults() {
  rl::TrainOptions t;
  t.updates_per_step = 2;
  return t;
}

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string scene;            // scene file; empty uses the built-in scene of the command
  std::string buffer_schedule;  // file of (step, goal quotas) rows
  std::string actor;            // checkpoint for eval-path
  std::string s2r_model;        // checkpoint for eval-path
  rl::RLConfig rl;
  rl::TQCConfig tqc;
  rl::TrainOptions train = circle_train_defaults();
  control::PIDConfig pid;
  S2RSection s2r;
  gail::GailConfig gail = harness_gail_defaults();
  CircleConfig circle;
  PickPlaceConfig pickplace;
  RecordDemoConfig record_demo;
  teleop::ServiceConfig serve;
  int deploy_max_steps = 20;
  bool eval_reality = false;  // eval-path: evaluate under the perturbation

  void validate() const;
};

/// Reads nested sections over the defaults; unknown keys are errors.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace ssilkc::harness
