#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "teleop/session.hpp"

namespace ssilkc::teleop {

/// HTTP front end of one session:
///   GET  /state          latest frame
///   GET  /scene          scene geometry
///   GET  /stream         server-sent events, one frame per published tick
///   POST /jog            {"mode": "tip"|"setpoint", "delta": [...]}
///   POST /goal           {"pose": [x, y, z, yaw, pitch, roll]}
///   POST /record/start, POST /record/stop, GET /record/last
///   POST /pilot/claim, POST /pilot/release
/// Once a pilot token is claimed, mutating requests must carry it in the
/// X-Pilot-Token header.
class Server {
 public:
  explicit Server(ServiceConfig cfg);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving in a background thread; returns the bound port.
  int start();
  /// Serves on the calling thread until stop().
  void run();
  void stop();

  [[nodiscard]] Session& session() { return *session_; }
  [[nodiscard]] int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::unique_ptr<Session> session_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace ssilkc::teleop
