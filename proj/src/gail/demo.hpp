#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "arm/arm_sim.hpp"
#include "rl/rl_types.hpp"

namespace ssilkc::gail {

using arm::ChamberVec;
using arm::Pose6D;

inline constexpr char kDemoFormat[] = "ssilkc-demo";
inline constexpr int kDemoVersion = 1;

/// One recorded arm state of a demonstration.
struct DemoRecord {
  double t = 0;  // s
  ChamberVec chamber_lengths{};
  ChamberVec spring_lengths{};
  ChamberVec f_sensor{};  // Hz
  Pose6D pose;
  Pose6D goal;
  std::string scene_id;
  std::string source;  // "teleop" | "scripted-oracle"
  int sequence = 0;    // pass index inside the file
};

struct DemoFile {
  std::vector<DemoRecord> records;
  /// Records grouped by `sequence`, in file order.
  [[nodiscard]] std::vector<std::vector<DemoRecord>> sequences() const;
};

std::string format_demo_record(const DemoRecord& r);
std::string demo_header();
void write_demo(std::ostream& out, const std::vector<DemoRecord>& records);
DemoFile read_demo(std::istream& in);
DemoFile load_demo(const std::string& path);
void save_demo(const std::string& path, const std::vector<DemoRecord>& records);

/// Expert transition after relabeling: state against the new goal, the
/// normalized action that produced the successor, and that goal.
struct DemoTransition {
  rl::RLState s;
  ChamberVec action_u{};
  Pose6D goal;
};

struct DemoDataset {
  std::vector<DemoTransition> records;
  std::size_t skipped_sequences = 0;
  std::string source;
};

/// Each consecutive pair (s_t, a_t, s_{t+1}) of every sequence becomes a
/// record whose goal is the pose achieved at t+1. The action is the sensor
/// reading of t+1, i.e. the setpoint that was reached.
DemoDataset relabel_demos(const std::vector<std::vector<DemoRecord>>& sequences, const rl::RLConfig& cfg,
                          const rl::ActionCodec& codec);

}  // namespace ssilkc::gail
