#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "arm/pipe_scene.hpp"
#include "control/pid.hpp"
#include "gail/demo.hpp"
#include "json.hpp"

namespace ssilkc::teleop {

inline constexpr int kSchemaVersion = 1;

enum class RecordMode { PerJog, PerTick };

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8765;  // 0 picks a free port
  double publish_hz = 30.0;
  int ticks_per_frame = 1;      // simulator ticks per published frame
  double tip_cap_mm = 20.0;     // per jog, per component
  double tip_cap_deg = 10.0;
  double setpoint_cap_mm = 10.0;
  control::PIDConfig pid;
  arm::ArmParams arm = arm::calibrated_params();
  arm::PipeScene scene = arm::open_scene();
  std::string record_dir = ".";
  RecordMode record_mode = RecordMode::PerJog;

  void validate() const;
};

struct Snapshot {
  long seq = 0;
  double t = 0;
  arm::ArmState state;
  arm::ChamberVec spring_lengths{};
  arm::ChamberVec f_sensor{};
  arm::Pose6D pose;
  arm::ChamberVec setpoints{};
  double clearance = 0;
  bool settled = true;
  bool recording = false;
  std::size_t recorded = 0;
  std::optional<arm::Pose6D> goal;
};

nlohmann::json snapshot_json(const Snapshot& s);

enum class JogMode { Setpoint, Tip };

struct JogCommand {
  JogMode mode = JogMode::Tip;
  std::vector<double> values;  // 9 spring deltas (mm), or 3 or 6 tip deltas (mm, deg)
};

/// Accepted setpoints or a structured rejection.
struct JogPlan {
  bool accepted = false;
  arm::ChamberVec setpoints{};
  int status = 200;
  nlohmann::json error;  // {code, message, ...} when rejected
};

/// Validates a jog against caps, spring bounds and the scene and computes the
/// new spring setpoints. Tip jogs take one damped least-squares step over the
/// finite-difference Jacobian from the current setpoints.
JogPlan plan_jog(const JogCommand& cmd, const arm::ChamberVec& setpoints, const ServiceConfig& cfg);

/// Parses {"mode": "tip" | "setpoint", "delta": [...]}.
JogCommand parse_jog(const nlohmann::json& body);

struct Reply {
  int status = 200;
  nlohmann::json body;
};

nlohmann::json error_body(const std::string& code, const std::string& message);

/// One simulated arm driven by a loop thread. Network handlers talk to it
/// only through the command queue and snapshot reads.
class Session {
 public:
  explicit Session(ServiceConfig cfg);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  void start();
  void stop();
  [[nodiscard]] bool running() const { return running_; }

  [[nodiscard]] Snapshot snapshot() const;
  /// Blocks until a frame newer than `after_seq` is published or the timeout
  /// passes; returns false on timeout or shutdown.
  bool wait_frame(long after_seq, Snapshot& out, std::chrono::milliseconds timeout) const;

  Reply jog(const JogCommand& cmd);
  Reply set_goal(const arm::Pose6D& goal);
  Reply record_start();
  Reply record_stop();

  [[nodiscard]] const ServiceConfig& config() const { return cfg_; }
  /// Text of the last demo file written by record_stop.
  [[nodiscard]] std::string last_demo() const;

 private:
  using Command = std::function<Reply()>;
  Reply submit(Command cmd);
  void loop();
  void publish();
  void append_record();

  ServiceConfig cfg_;
  control::ArmEnv env_;
  control::PidController pid_;
  arm::ChamberVec setpoints_{};
  std::optional<arm::Pose6D> goal_;
  bool settled_ = true;
  bool pending_jog_record_ = false;
  bool recording_ = false;
  std::vector<gail::DemoRecord> records_;
  int demo_counter_ = 0;
  std::string last_demo_;
  double clock_ = 0;

  mutable std::mutex queue_mutex_;
  std::deque<std::pair<Command, std::promise<Reply>>> queue_;

  mutable std::mutex frame_mutex_;
  mutable std::condition_variable frame_cv_;
  Snapshot frame_;

  std::atomic<bool> running_{false};
  std::thread thread_;
};

}  // namespace ssilkc::teleop
