#include "teleop/session.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "common/errors.hpp"
#include "arm/ik.hpp"
#include "gail/oracle.hpp"

namespace ssilkc::teleop {

using nlohmann::json;

void ServiceConfig::validate() const {
  if (!(publish_hz > 0)) throw std::invalid_argument("ServiceConfig: publish rate must be positive");
  if (ticks_per_frame < 1) throw std::invalid_argument("ServiceConfig: ticks_per_frame must be at least 1");
  if (!(tip_cap_mm > 0 && tip_cap_deg > 0 && setpoint_cap_mm > 0))
    throw std::invalid_argument("ServiceConfig: jog caps must be positive");
  if (port < 0 || port > 65535) throw std::invalid_argument("ServiceConfig: port out of range");
  pid.validate();
  arm.validate();
  scene.validate();
}

json error_body(const std::string& code, const std::string& message) {
  return json{{"version", kSchemaVersion}, {"error", {{"code", code}, {"message", message}}}};
}

json snapshot_json(const Snapshot& s) {
  json j;
  j["version"] = kSchemaVersion;
  j["seq"] = s.seq;
  j["t"] = s.t;
  j["chamber_lengths"] = s.state.chamber_lengths;
  j["spring_lengths"] = s.spring_lengths;
  j["f_sensor"] = s.f_sensor;
  j["pressures"] = s.state.pressures;
  j["saturation_flags"] = s.state.saturation_flags;
  j["pose"] = s.pose.to_array();
  j["setpoints"] = s.setpoints;
  j["clearance"] = std::isfinite(s.clearance) ? json(s.clearance) : json(nullptr);
  j["settled"] = s.settled;
  j["recording"] = s.recording;
  j["recorded"] = s.recorded;
  j["goal"] = s.goal ? json(s.goal->to_array()) : json(nullptr);
  return j;
}

JogCommand parse_jog(const json& body) {
  JogCommand cmd;
  const std::string mode = body.value("mode", "tip");
  if (mode == "tip") {
    cmd.mode = JogMode::Tip;
  } else if (mode == "setpoint") {
    cmd.mode = JogMode::Setpoint;
  } else {
    throw std::invalid_argument("unknown jog mode '" + mode + "'");
  }
  if (!body.contains("delta") || !body["delta"].is_array()) throw std::invalid_argument("jog needs a delta array");
  for (const auto& v : body["delta"]) {
    if (!v.is_number()) throw std::invalid_argument("jog delta entries must be numbers");
    cmd.values.push_back(v.get<double>());
  }
  const std::size_t n = cmd.values.size();
  if (cmd.mode == JogMode::Setpoint && n != 9) throw std::invalid_argument("setpoint jog needs 9 values");
  if (cmd.mode == JogMode::Tip && n != 3 && n != 6) throw std::invalid_argument("tip jog needs 3 or 6 values");
  return cmd;
}

JogPlan plan_jog(const JogCommand& cmd, const arm::ChamberVec& setpoints, const ServiceConfig& cfg) {
  JogPlan plan;
  auto reject = [&](int status, const std::string& code, const std::string& message) {
    plan.accepted = false;
    plan.status = status;
    plan.error = error_body(code, message);
    return plan;
  };
  bool zero = true;
  for (std::size_t i = 0; i < cmd.values.size(); ++i) {
    const double v = cmd.values[i];
    if (!std::isfinite(v)) return reject(400, "bad_request", "jog delta must be finite");
    zero = zero && v == 0.0;
    const double cap = cmd.mode == JogMode::Setpoint ? cfg.setpoint_cap_mm : (i < 3 ? cfg.tip_cap_mm : cfg.tip_cap_deg);
    if (std::abs(v) > cap) {
      reject(422, "cap_exceeded", "jog component " + std::to_string(i) + " exceeds the per-jog cap");
      plan.error["error"]["cap"] = cap;
      plan.error["error"]["index"] = i;
      return plan;
    }
  }
  if (zero) {
    plan.accepted = true;
    plan.setpoints = setpoints;
    return plan;
  }

  arm::ChamberVec next = setpoints;
  const double lo = cfg.arm.chamber_min, hi = cfg.arm.chamber_max;
  if (cmd.mode == JogMode::Setpoint) {
    for (std::size_t i = 0; i < 9; ++i) next[i] += cmd.values[i];
    for (std::size_t i = 0; i < 9; ++i) {
      if (next[i] < lo || next[i] > hi) {
        reject(422, "out_of_bounds", "setpoint " + std::to_string(i) + " would leave the spring bounds");
        plan.error["error"]["bounds"] = {lo, hi};
        return plan;
      }
    }
  } else {
    const arm::ChamberVec chambers = arm::chambers_from_springs(setpoints, cfg.arm);
    const arm::Frame f = arm::forward_frame(chambers, cfg.arm);
    const Eigen::Vector3d target = f.position + Eigen::Vector3d(cmd.values[0], cmd.values[1], cmd.values[2]);
    arm::IkOptions ik;
    ik.damping = 1e-2;
    ik.spring_min = lo;
    ik.spring_max = hi;
    const bool rotate = cmd.values.size() == 6 && (cmd.values[3] != 0 || cmd.values[4] != 0 || cmd.values[5] != 0);
    if (rotate) {
      const Eigen::Matrix3d r = arm::ypr_to_rotation(cmd.values[3], cmd.values[4], cmd.values[5]);
      ik.tip_axis = (r * f.rotation.col(2)).normalized();
    }
    const arm::IkResult sol = arm::solve_ik(target, setpoints, cfg.arm, ik);
    if (sol.position_error > 1.0 || (rotate && sol.axis_error_deg > 1.0)) {
      reject(422, "unreachable", "tip jog target is outside the reachable workspace");
      plan.error["error"]["residual_mm"] = sol.position_error;
      return plan;
    }
    next = sol.springs;
  }
  const auto rep = arm::collision_check(arm::chambers_from_springs(next, cfg.arm), cfg.scene, cfg.arm);
  if (rep.collides) {
    reject(409, "collision", "jog would bring the arm into contact with the scene");
    plan.error["error"]["clearance"] = rep.worst_clearance;
    return plan;
  }
  plan.accepted = true;
  plan.setpoints = next;
  return plan;
}

Session::Session(ServiceConfig cfg) : cfg_(std::move(cfg)), env_(cfg_.arm), pid_(cfg_.pid) {
  cfg_.validate();
  setpoints_ = env_.spring_lengths();
  pid_.retarget(env_, setpoints_);
  publish();
}

Session::~Session() { stop(); }

void Session::start() {
  if (running_.exchange(true)) return;
  thread_ = std::thread([this] { loop(); });
}

void Session::stop() {
  if (!running_.exchange(false)) return;
  frame_cv_.notify_all();
  if (thread_.joinable()) thread_.join();
  std::lock_guard lock(queue_mutex_);
  for (auto& [cmd, promise] : queue_) promise.set_value({503, error_body("stopped", "session stopped")});
  queue_.clear();
}

Snapshot Session::snapshot() const {
  std::lock_guard lock(frame_mutex_);
  return frame_;
}

bool Session::wait_frame(long after_seq, Snapshot& out, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(frame_mutex_);
  const bool ok = frame_cv_.wait_for(lock, timeout, [&] { return frame_.seq > after_seq || !running_; });
  if (!ok || frame_.seq <= after_seq) return false;
  out = frame_;
  return true;
}

std::string Session::last_demo() const {
  std::lock_guard lock(queue_mutex_);
  return last_demo_;
}

Reply Session::submit(Command cmd) {
  if (!running_) return {503, error_body("stopped", "session is not running")};
  std::future<Reply> fut;
  {
    std::lock_guard lock(queue_mutex_);
    std::promise<Reply> p;
    fut = p.get_future();
    queue_.emplace_back(std::move(cmd), std::move(p));
  }
  return fut.get();
}

void Session::append_record() {
  const arm::Pose6D pose = env_.model_pose();
  gail::DemoRecord r = gail::snapshot_record(env_, goal_.value_or(pose), cfg_.scene.id, "teleop", 0);
  r.t = clock_;
  records_.push_back(r);
}

Reply Session::jog(const JogCommand& cmd) {
  return submit([this, cmd] {
    const JogPlan plan = plan_jog(cmd, setpoints_, cfg_);
    if (!plan.accepted) return Reply{plan.status, plan.error};
    if (recording_ && cfg_.record_mode == RecordMode::PerJog && pending_jog_record_) append_record();
    setpoints_ = plan.setpoints;
    pid_.retarget(env_, setpoints_);
    settled_ = pid_.max_error(env_) < cfg_.pid.settle_tolerance;
    pending_jog_record_ = true;
    if (settled_ && recording_ && cfg_.record_mode == RecordMode::PerJog) {
      append_record();
      pending_jog_record_ = false;
    }
    json body{{"version", kSchemaVersion}, {"accepted", true}, {"setpoints", setpoints_}};
    return Reply{200, body};
  });
}

Reply Session::set_goal(const arm::Pose6D& goal) {
  return submit([this, goal] {
    goal_ = goal;
    return Reply{200, json{{"version", kSchemaVersion}, {"goal", goal.to_array()}}};
  });
}

Reply Session::record_start() {
  return submit([this] {
    if (recording_) return Reply{409, error_body("already_recording", "a recording is already running")};
    recording_ = true;
    pending_jog_record_ = false;
    records_.clear();
    return Reply{200, json{{"version", kSchemaVersion}, {"recording", true}}};
  });
}

Reply Session::record_stop() {
  return submit([this] {
    if (!recording_) return Reply{409, error_body("not_recording", "no recording is running")};
    if (cfg_.record_mode == RecordMode::PerJog && pending_jog_record_) append_record();
    pending_jog_record_ = false;
    recording_ = false;
    std::ostringstream text;
    gail::write_demo(text, records_);
    std::string path;
    try {
      std::filesystem::create_directories(cfg_.record_dir);
      path = (std::filesystem::path(cfg_.record_dir) / ("demo_" + std::to_string(demo_counter_++) + ".jsonl")).string();
      std::ofstream out(path);
      if (!out) throw IoError("cannot open " + path);
      out << text.str();
    } catch (const std::exception& e) {
      return Reply{500, error_body("write_failed", e.what())};
    }
    {
      std::lock_guard lock(queue_mutex_);
      last_demo_ = text.str();
    }
    json body{{"version", kSchemaVersion}, {"path", path}, {"records", records_.size()}};
    records_.clear();
    return Reply{200, body};
  });
}

void Session::publish() {
  Snapshot s;
  s.t = clock_;
  s.state = env_.state();
  s.spring_lengths = env_.spring_lengths();
  s.f_sensor = env_.sensor_frequencies();
  s.pose = env_.model_pose();
  s.setpoints = setpoints_;
  s.clearance = arm::collision_check(env_.state().chamber_lengths, cfg_.scene, cfg_.arm).worst_clearance;
  s.settled = settled_;
  s.recording = recording_;
  s.recorded = records_.size();
  s.goal = goal_;
  {
    std::lock_guard lock(frame_mutex_);
    s.seq = frame_.seq + 1;
    frame_ = s;
  }
  frame_cv_.notify_all();
}

void Session::loop() {
  const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / cfg_.publish_hz));
  auto next = std::chrono::steady_clock::now();
  while (running_) {
    std::deque<std::pair<Command, std::promise<Reply>>> work;
    {
      std::lock_guard lock(queue_mutex_);
      work.swap(queue_);
    }
    for (auto& [cmd, promise] : work) {
      try {
        promise.set_value(cmd());
      } catch (const std::exception& e) {
        promise.set_value({500, error_body("internal", e.what())});
      }
    }
    for (int k = 0; k < cfg_.ticks_per_frame; ++k) {
      if (!settled_) {
        pid_.tick(env_);
        clock_ += cfg_.arm.sim_dt;
        settled_ = pid_.max_error(env_) < cfg_.pid.settle_tolerance;
        if (recording_ && cfg_.record_mode == RecordMode::PerTick) append_record();
        if (settled_ && recording_ && cfg_.record_mode == RecordMode::PerJog && pending_jog_record_) {
          append_record();
          pending_jog_record_ = false;
        }
      }
    }
    publish();
    next += period;
    std::this_thread::sleep_until(next);
  }
}

}  // namespace ssilkc::teleop
