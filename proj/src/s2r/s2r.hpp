#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "control/pid.hpp"
#include "control/sensor_env.hpp"
#include "learn/mlp.hpp"

namespace ssilkc::s2r {

using arm::ChamberVec;
using arm::Pose6D;

struct S2RConfig {
  double learning_rate = 0.01;
  int batch = 128;
  int epochs = 200;
  int hidden = 64;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct S2RSample {
  Pose6D pose;               // simulated pose P
  ChamberVec spring_lengths{};  // mm
  Pose6D real_pose;          // target P_real
};

struct DatasetOptions {
  std::size_t n = 2000;
  double spring_min = 105.0;  // setpoint box, mm
  double spring_max = 235.0;
  control::RealityPerturbation perturbation = control::RealityPerturbation::default_gap();
  control::PIDConfig pid;
  arm::ArmParams arm = arm::calibrated_params();
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<S2RSample> samples;
  std::size_t dropped = 0;  // setpoints where either PID run did not settle
};

/// Tracks random spring setpoints with sensor-space PID in the nominal and in
/// the perturbed simulator and pairs the resulting poses.
Dataset collect_s2r_dataset(const DatasetOptions& opt);

/// Residual network: P_S2R = P + scale * net(features(P, L)).
struct S2RModel {
  learn::MLP net;
};

struct TrainReport {
  std::size_t train_size = 0;
  std::size_t holdout_size = 0;
  double holdout_rmse = 0;           // translation, mm
  double identity_rmse = 0;          // translation, mm, P vs P_real on the holdout
  double holdout_angle_rmse = 0;     // deg
  double identity_angle_rmse = 0;    // deg
  std::vector<double> epoch_loss;    // mean training MSE per epoch
};

S2RModel train_s2r(const std::vector<S2RSample>& samples, const S2RConfig& cfg, TrainReport* report = nullptr);

/// Model that returns its input pose unchanged.
S2RModel identity_model(int hidden = 64);

Pose6D apply_s2r(const S2RModel& model, const Pose6D& pose, const ChamberVec& spring_lengths);

/// Translation and angle RMSE of `model` over `samples`.
std::pair<double, double> evaluate_rmse(const S2RModel& model, const std::vector<S2RSample>& samples);

/// Line-delimited dataset file with a versioned header line.
void write_dataset(std::ostream& out, const std::vector<S2RSample>& samples);
std::vector<S2RSample> read_dataset(std::istream& in);

void save_model(const std::string& path, const S2RModel& model);
S2RModel load_model(const std::string& path);

}  // namespace ssilkc::s2r
