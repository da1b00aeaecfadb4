#include "ssilkc/ssilkc.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "common/errors.hpp"
#include "control/deploy.hpp"
#include "harness/config.hpp"
#include "harness/experiments.hpp"
#include "learn/checkpoint.hpp"
#include "teleop/server.hpp"

using namespace ssilkc;
using nlohmann::json;

struct ssilkc_env {
  control::ArmEnv env;
};
struct ssilkc_policy {
  rl::Policy policy;
};
struct ssilkc_s2r {
  s2r::S2RModel model;
};
struct ssilkc_server {
  std::unique_ptr<teleop::Server> server;
};

namespace {

thread_local std::string g_last_error;

ssilkc_status fail(ssilkc_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
ssilkc_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return SSILKC_OK;
  } catch (const std::invalid_argument& e) {
    return fail(SSILKC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const json::exception& e) {
    return fail(SSILKC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(SSILKC_ERR_DOMAIN, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(SSILKC_ERR_IO, e.what());
  } catch (const IoError& e) {
    return fail(SSILKC_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SSILKC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SSILKC_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(SSILKC_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw std::invalid_argument(std::string(what) + " is NULL");
}

arm::ChamberVec vec9(const double* v) {
  arm::ChamberVec out{};
  std::memcpy(out.data(), v, sizeof(double) * out.size());
  return out;
}

void put9(const arm::ChamberVec& v, double* out) { std::memcpy(out, v.data(), sizeof(double) * v.size()); }

void put_pose(const arm::Pose6D& p, double* out) {
  const auto a = p.to_array();
  std::memcpy(out, a.data(), sizeof(double) * 6);
}

arm::Pose6D pose_of(const double* v) { return arm::Pose6D::from_array(std::span<const double>(v, 6)); }

harness::ExperimentConfig resolve(const char* config_json, const char* overrides_json) {
  json j = json::object();
  if (config_json != nullptr && *config_json != '\0') j = json::parse(config_json, nullptr, true, true);
  if (overrides_json != nullptr && *overrides_json != '\0') j.merge_patch(json::parse(overrides_json));
  return harness::config_from_json(j);
}

ssilkc_status emit(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed != nullptr) *needed = text.size() + 1;
  if (buf == nullptr || cap < text.size() + 1)
    return fail(SSILKC_ERR_BUFFER_TOO_SMALL, "output buffer needs " + std::to_string(text.size() + 1) + " bytes");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return SSILKC_OK;
}

rl::ActionCodec default_codec() { return rl::ActionCodec::for_arm(sensor::SensorModel{}, arm::calibrated_params()); }

}  // namespace

extern "C" {

const char* ssilkc_last_error(void) { return g_last_error.c_str(); }

const char* ssilkc_version(void) { return "0.1.0"; }

const char* ssilkc_status_name(ssilkc_status status) {
  switch (status) {
    case SSILKC_OK: return "ok";
    case SSILKC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SSILKC_ERR_DOMAIN: return "domain";
    case SSILKC_ERR_IO: return "io";
    case SSILKC_ERR_RUNTIME: return "runtime";
    case SSILKC_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case SSILKC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

ssilkc_status ssilkc_forward_kinematics(const double chambers[9], double pose[6]) {
  return guarded([&] {
    require(chambers, "chambers");
    require(pose, "pose");
    put_pose(arm::forward_kinematics(std::span<const double>(chambers, 9), arm::calibrated_params()), pose);
  });
}

ssilkc_status ssilkc_sensor_length_to_frequency(double spring_mm, double* frequency_hz) {
  return guarded([&] {
    require(frequency_hz, "frequency_hz");
    *frequency_hz = sensor::SensorModel{}.map_inverse(spring_mm);
  });
}

ssilkc_status ssilkc_sensor_frequency_to_length(double frequency_hz, double* spring_mm) {
  return guarded([&] {
    require(spring_mm, "spring_mm");
    *spring_mm = sensor::SensorModel{}.map(frequency_hz);
  });
}

ssilkc_status ssilkc_env_create(int reality, uint64_t noise_seed, ssilkc_env** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    const auto gap = reality != 0 ? control::RealityPerturbation::default_gap() : control::RealityPerturbation{};
    *out = new ssilkc_env{control::ArmEnv(arm::calibrated_params(), sensor::SensorModel{}, gap, noise_seed)};
  });
}

void ssilkc_env_destroy(ssilkc_env* env) { delete env; }

ssilkc_status ssilkc_env_reset(ssilkc_env* env, const double chambers[9]) {
  return guarded([&] {
    require(env, "env");
    require(chambers, "chambers");
    env->env.reset(vec9(chambers));
  });
}

ssilkc_status ssilkc_env_set_load(ssilkc_env* env, double grams) {
  return guarded([&] {
    require(env, "env");
    env->env.set_load_mass(grams);
  });
}

ssilkc_status ssilkc_env_springs(const ssilkc_env* env, double springs[9]) {
  return guarded([&] {
    require(env, "env");
    require(springs, "springs");
    put9(env->env.spring_lengths(), springs);
  });
}

ssilkc_status ssilkc_env_pressures(const ssilkc_env* env, double pressures_kpa[9]) {
  return guarded([&] {
    require(env, "env");
    require(pressures_kpa, "pressures_kpa");
    put9(env->env.state().pressures, pressures_kpa);
  });
}

ssilkc_status ssilkc_env_pose(ssilkc_env* env, int truth, double pose[6]) {
  return guarded([&] {
    require(env, "env");
    require(pose, "pose");
    put_pose(truth != 0 ? env->env.true_pose() : env->env.model_pose(), pose);
  });
}

ssilkc_status ssilkc_env_track(ssilkc_env* env, const double springs[9], int* settled, int* ticks) {
  return guarded([&] {
    require(env, "env");
    require(springs, "springs");
    const auto r = control::pid_track(env->env, vec9(springs), control::PIDConfig{});
    if (settled != nullptr) *settled = r.settled ? 1 : 0;
    if (ticks != nullptr) *ticks = r.ticks;
  });
}

ssilkc_status ssilkc_policy_load(const char* path, ssilkc_policy** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new ssilkc_policy{rl::Policy(learn::load_checkpoint(path), default_codec())};
  });
}

void ssilkc_policy_destroy(ssilkc_policy* policy) { delete policy; }

ssilkc_status ssilkc_policy_act(const ssilkc_policy* policy, const double pose[6], const double goal[6],
                                double frequencies_hz[9]) {
  return guarded([&] {
    require(policy, "policy");
    require(pose, "pose");
    require(goal, "goal");
    require(frequencies_hz, "frequencies_hz");
    std::mt19937_64 rng(0);
    const auto s = rl::build_state(pose_of(pose), pose_of(goal), rl::RLConfig{});
    put9(rl::act(policy->policy, s, true, rng), frequencies_hz);
  });
}

ssilkc_status ssilkc_s2r_load(const char* path, ssilkc_s2r** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new ssilkc_s2r{s2r::load_model(path)};
  });
}

void ssilkc_s2r_destroy(ssilkc_s2r* model) { delete model; }

ssilkc_status ssilkc_s2r_apply(const ssilkc_s2r* model, const double pose[6], const double springs[9],
                               double corrected[6]) {
  return guarded([&] {
    require(model, "model");
    require(pose, "pose");
    require(springs, "springs");
    require(corrected, "corrected");
    put_pose(s2r::apply_s2r(model->model, pose_of(pose), vec9(springs)), corrected);
  });
}

ssilkc_status ssilkc_deploy(const ssilkc_policy* policy, const ssilkc_s2r* s2r, ssilkc_env* env, const double goal[6],
                            int max_steps, int* success, double* error_mm) {
  return guarded([&] {
    require(policy, "policy");
    require(env, "env");
    require(goal, "goal");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
    control::DeployConfig cfg;
    cfg.max_steps = max_steps;
    const auto r = control::deploy_policy(policy->policy, s2r != nullptr ? &s2r->model : nullptr, pose_of(goal),
                                          env->env, cfg);
    if (success != nullptr) *success = r.success ? 1 : 0;
    if (error_mm != nullptr) *error_mm = r.translation_error;
  });
}

ssilkc_status ssilkc_config_resolve(const char* config_json, const char* overrides_json, char* buf, size_t cap,
                                    size_t* needed) {
  std::string text;
  const ssilkc_status s = guarded([&] {
    const auto cfg = resolve(config_json, overrides_json);
    cfg.validate();
    text = harness::config_to_json(cfg).dump(2);
  });
  return s != SSILKC_OK ? s : emit(text, buf, cap, needed);
}

ssilkc_status ssilkc_run_experiment(const char* command, const char* config_json, const char* overrides_json,
                                    char* metrics, size_t cap, size_t* needed) {
  std::string text;
  const ssilkc_status s = guarded([&] {
    require(command, "command");
    text = harness::run_command(command, resolve(config_json, overrides_json)).dump(2);
  });
  return s != SSILKC_OK ? s : emit(text, metrics, cap, needed);
}

ssilkc_status ssilkc_server_create(const char* config_json, const char* overrides_json, ssilkc_server** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    const auto cfg = resolve(config_json, overrides_json);
    cfg.validate();
    *out = new ssilkc_server{std::make_unique<teleop::Server>(cfg.serve)};
  });
}

void ssilkc_server_destroy(ssilkc_server* server) { delete server; }

ssilkc_status ssilkc_server_start(ssilkc_server* server, int* port) {
  return guarded([&] {
    require(server, "server");
    const int p = server->server->start();
    if (port != nullptr) *port = p;
  });
}

ssilkc_status ssilkc_server_run(ssilkc_server* server) {
  return guarded([&] {
    require(server, "server");
    server->server->run();
  });
}

ssilkc_status ssilkc_server_stop(ssilkc_server* server) {
  return guarded([&] {
    require(server, "server");
    server->server->stop();
  });
}

}  // extern "C"
