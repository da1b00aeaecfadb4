#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssilkc/ssilkc.h"

using nlohmann::json;

namespace {

int exit_code(ssilkc_status s) {
  switch (s) {
    case SSILKC_OK: return 0;
    case SSILKC_ERR_INVALID_ARGUMENT: return 2;
    case SSILKC_ERR_IO: return 3;
    default: return 1;
  }
}

int report(ssilkc_status s) {
  if (s != SSILKC_OK) std::cerr << "ssilkc: " << ssilkc_status_name(s) << ": " << ssilkc_last_error() << "\n";
  return exit_code(s);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_experiment(const std::string& command, const std::string& config, const json& overrides) {
  std::vector<char> buf(std::size_t{1} << 22);
  size_t needed = 0;
  const ssilkc_status s =
      ssilkc_run_experiment(command.c_str(), config.c_str(), overrides.dump().c_str(), buf.data(), buf.size(), &needed);
  if (s == SSILKC_OK) std::cout << buf.data() << "\n";
  if (s == SSILKC_ERR_BUFFER_TOO_SMALL) {
    std::cerr << "metrics are in the output directory's metrics.json\n";
    return 0;
  }
  return report(s);
}

int serve(const std::string& config, const json& overrides) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ssilkc_server* server = nullptr;
  ssilkc_status s = ssilkc_server_create(config.c_str(), overrides.dump().c_str(), &server);
  if (s != SSILKC_OK) return report(s);
  int port = 0;
  s = ssilkc_server_start(server, &port);
  if (s != SSILKC_OK) {
    ssilkc_server_destroy(server);
    return report(s);
  }
  std::cerr << "serving on port " << port << " (Ctrl-C to stop)\n";
  int sig = 0;
  sigwait(&signals, &sig);
  s = ssilkc_server_stop(server);
  ssilkc_server_destroy(server);
  return report(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-manipulator simulation, learning and teleoperation harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ssilkc_version());

  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file (comments allowed)")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "master seed");

  auto* workspace = app.add_subcommand("workspace", "sweep the chamber grid and report workspace coverage");

  auto* circle = app.add_subcommand("train-circle", "train and evaluate the circle path-following policy");
  bool ablation = false;
  circle->add_flag("--ablation-s2r", ablation, "also train with S2R and compare on the perturbed arm");

  auto* s2r = app.add_subcommand("train-s2r", "collect a sim/reality dataset and fit the S2R network");

  auto* record = app.add_subcommand("record-demo", "record demonstrations (oracle script or teleop)");
  std::string record_mode = "oracle";
  double record_diameter = 0;
  int passes = 0;
  record->add_option("--mode", record_mode, "oracle | teleop")->check(CLI::IsMember({"oracle", "teleop"}));
  record->add_option("--diameter", record_diameter, "pipe diameter, mm");
  record->add_option("--passes", passes, "oracle passes (alternating mirror image)");

  auto* pick = app.add_subcommand("pickplace", "GAIL vs reward-only training in the cross pipe");
  std::string demo;
  bool no_baseline = false, no_reuse = false;
  pick->add_option("--demo", demo, "demonstration file (default <out>/demo.jsonl)");
  pick->add_flag("--no-baseline", no_baseline, "skip the reward-only run");
  pick->add_flag("--no-reuse", no_reuse, "skip the smaller-pipe reuse phase");

  auto* eval = app.add_subcommand("eval-path", "follow the circle path with a trained policy");
  std::string actor, s2r_model;
  bool reality = false;
  eval->add_option("--actor", actor, "policy checkpoint")->check(CLI::ExistingFile);
  eval->add_option("--s2r", s2r_model, "S2R checkpoint")->check(CLI::ExistingFile);
  eval->add_flag("--reality", reality, "evaluate on the perturbed arm");

  auto* gp = app.add_subcommand("gp-ablation", "discriminator saturation with and without the gradient penalty");

  auto* srv = app.add_subcommand("serve", "teleoperation HTTP service");
  std::string host, record_dir, jog_record;
  int port = -1;
  srv->add_option("--host", host, "bind address");
  srv->add_option("--port", port, "port; 0 picks a free one");
  srv->add_option("--record-dir", record_dir, "directory for recorded demos");
  srv->add_option("--record-mode", jog_record, "per-jog | per-tick")->check(CLI::IsMember({"per-jog", "per-tick"}));

  CLI11_PARSE(app, argc, argv);

  std::string config;
  try {
    if (!config_path.empty()) config = read_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "ssilkc: " << e.what() << "\n";
    return 3;
  }

  json ov = json::object();
  if (app.count("--seed") > 0) ov["seed"] = seed;
  if (!out.empty()) ov["out"] = out;

  if (*workspace) return run_experiment("workspace", config, ov);
  if (*circle) {
    if (ablation) ov["circle"]["ablation_s2r"] = true;
    return run_experiment("train-circle", config, ov);
  }
  if (*s2r) return run_experiment("train-s2r", config, ov);
  if (*gp) return run_experiment("gp-ablation", config, ov);
  if (*pick) {
    if (!demo.empty()) ov["pickplace"]["demo"] = demo;
    if (no_baseline) ov["pickplace"]["run_baseline"] = false;
    if (no_reuse) ov["pickplace"]["run_reuse"] = false;
    return run_experiment("pickplace", config, ov);
  }
  if (*eval) {
    if (!actor.empty()) ov["actor"] = actor;
    if (!s2r_model.empty()) ov["s2r_model"] = s2r_model;
    if (reality) ov["eval_reality"] = true;
    return run_experiment("eval-path", config, ov);
  }
  if (*record) {
    if (record_diameter > 0) ov["record_demo"]["diameter"] = record_diameter;
    if (passes > 0) ov["record_demo"]["passes"] = passes;
    if (record_mode == "teleop") {
      ov["serve"]["record_dir"] = out.empty() ? std::string(".") : out;
      return serve(config, ov);
    }
    return run_experiment("record-demo", config, ov);
  }
  if (*srv) {
    if (!host.empty()) ov["serve"]["host"] = host;
    if (port >= 0) ov["serve"]["port"] = port;
    if (!record_dir.empty()) ov["serve"]["record_dir"] = record_dir;
    if (!jog_record.empty()) ov["serve"]["record_mode"] = jog_record;
    return serve(config, ov);
  }
  return 2;
}
