#include "teleop/server.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

#include "httplib.h"

namespace ssilkc::teleop {

using nlohmann::json;

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json scene_json(const arm::PipeScene& scene) {
  json cyl = json::array();
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  for (const auto& c : scene.cylinders) {
    cyl.push_back({{"origin", {c.origin.x(), c.origin.y(), c.origin.z()}},
                   {"direction", {c.direction.x(), c.direction.y(), c.direction.z()}},
                   {"radius", num(c.radius)},
                   {"half_length", num(c.half_length)}});
  }
  return {{"version", kSchemaVersion},
          {"id", scene.id},
          {"arm_body_radius", scene.arm_body_radius},
          {"cylinders", cyl},
          {"text", arm::format_scene(scene)}};
}

std::string new_token() {
  std::random_device rd;
  std::ostringstream os;
  os << std::hex << rd() << rd();
  return os.str();
}

}  // namespace

struct Server::Impl {
  httplib::Server http;
  std::mutex pilot_mutex;
  std::string pilot;

  bool authorized(const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(pilot_mutex);
    if (pilot.empty() || req.get_header_value("X-Pilot-Token") == pilot) return true;
    send(res, 403, error_body("not_pilot", "another client holds the pilot token"));
    return false;
  }
};

Server::Server(ServiceConfig cfg) : impl_(std::make_unique<Impl>()), session_(std::make_unique<Session>(std::move(cfg))) {
  auto& http = impl_->http;
  Session* s = session_.get();
  Impl* im = impl_.get();

  auto parse_body = [](const httplib::Request& req, httplib::Response& res, json& out) {
    try {
      out = req.body.empty() ? json::object() : json::parse(req.body);
      if (!out.is_object()) throw std::invalid_argument("body must be a JSON object");
      return true;
    } catch (const std::exception& e) {
      send(res, 400, error_body("bad_request", e.what()));
      return false;
    }
  };

  http.Get("/state", [s](const httplib::Request&, httplib::Response& res) { send(res, 200, snapshot_json(s->snapshot())); });
  http.Get("/scene", [s](const httplib::Request&, httplib::Response& res) { send(res, 200, scene_json(s->config().scene)); });
  http.Post("/jog", [s, im, parse_body](const httplib::Request& req, httplib::Response& res) {
    if (!im->authorized(req, res)) return;
    json body;
    if (!parse_body(req, res, body)) return;
    JogCommand cmd;
    try {
      cmd = parse_jog(body);
    } catch (const std::exception& e) {
      send(res, 400, error_body("bad_request", e.what()));
      return;
    }
    const Reply r = s->jog(cmd);
    send(res, r.status, r.body);
  });
  http.Post("/goal", [s, im, parse_body](const httplib::Request& req, httplib::Response& res) {
    if (!im->authorized(req, res)) return;
    json body;
    if (!parse_body(req, res, body)) return;
    std::vector<double> v;
    try {
      v = body.at("pose").get<std::vector<double>>();
      if (v.size() != 6) throw std::invalid_argument("pose needs 6 values");
    } catch (const std::exception& e) {
      send(res, 400, error_body("bad_request", std::string("goal: ") + e.what()));
      return;
    }
    const Reply r = s->set_goal(arm::Pose6D::from_array(v));
    send(res, r.status, r.body);
  });
  http.Post("/record/start", [s, im](const httplib::Request& req, httplib::Response& res) {
    if (!im->authorized(req, res)) return;
    const Reply r = s->record_start();
    send(res, r.status, r.body);
  });
  http.Post("/record/stop", [s, im](const httplib::Request& req, httplib::Response& res) {
    if (!im->authorized(req, res)) return;
    const Reply r = s->record_stop();
    send(res, r.status, r.body);
  });
  http.Get("/record/last", [s](const httplib::Request&, httplib::Response& res) {
    const std::string text = s->last_demo();
    if (text.empty()) {
      send(res, 404, error_body("no_demo", "nothing has been recorded yet"));
      return;
    }
    res.set_content(text, "application/x-ndjson");
  });
  http.Post("/pilot/claim", [im](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(im->pilot_mutex);
    if (!im->pilot.empty()) {
      send(res, 409, error_body("pilot_taken", "the pilot token is held by another client"));
      return;
    }
    im->pilot = new_token();
    send(res, 200, json{{"version", kSchemaVersion}, {"token", im->pilot}});
  });
  http.Post("/pilot/release", [im](const httplib::Request& req, httplib::Response& res) {
    if (!im->authorized(req, res)) return;
    std::lock_guard lock(im->pilot_mutex);
    im->pilot.clear();
    send(res, 200, json{{"version", kSchemaVersion}, {"released", true}});
  });
  http.Get("/stream", [s](const httplib::Request&, httplib::Response& res) {
    auto last = std::make_shared<long>(s->snapshot().seq - 1);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [s, last](std::size_t, httplib::DataSink& sink) {
      Snapshot snap;
      if (!s->running()) {
        sink.done();
        return true;
      }
      if (!s->wait_frame(*last, snap, std::chrono::milliseconds(500))) return s->running();
      *last = snap.seq;
      const std::string msg = "data: " + snapshot_json(snap).dump() + "\n\n";
      return sink.write(msg.data(), msg.size());
    });
  });
}

Server::~Server() { stop(); }

int Server::start() {
  const auto& cfg = session_->config();
  port_ = cfg.port == 0 ? impl_->http.bind_to_any_port(cfg.host) : cfg.port;
  if (cfg.port != 0 && !impl_->http.bind_to_port(cfg.host, cfg.port)) port_ = -1;
  if (port_ < 0) throw std::runtime_error("teleop: cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  session_->start();
  thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return port_;
}

void Server::run() {
  if (!thread_.joinable()) start();
  thread_.join();
}

void Server::stop() {
  session_->stop();
  impl_->http.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace ssilkc::teleop
