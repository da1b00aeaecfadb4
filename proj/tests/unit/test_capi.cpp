#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"

#include "ssilkc/ssilkc.h"

namespace fs = std::filesystem;

TEST_CASE("status reporting") {
  CHECK(std::string(ssilkc_status_name(SSILKC_ERR_IO)) == "io");
  CHECK(std::string(ssilkc_version()) == "0.1.0");
  double pose[6];
  CHECK(ssilkc_forward_kinematics(nullptr, pose) == SSILKC_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ssilkc_last_error()).find("chambers") != std::string::npos);
  double chambers[9];
  for (double& c : chambers) c = 200.0;
  CHECK(ssilkc_forward_kinematics(chambers, pose) == SSILKC_OK);
  CHECK(std::string(ssilkc_last_error()).empty());
  CHECK(pose[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(pose[2] == doctest::Approx(600.0));
  chambers[0] = 1000.0;
  CHECK(ssilkc_forward_kinematics(chambers, pose) == SSILKC_ERR_DOMAIN);
}

TEST_CASE("sensor conversions") {
  double f = 0, l = 0;
  REQUIRE(ssilkc_sensor_length_to_frequency(180.0, &f) == SSILKC_OK);
  REQUIRE(ssilkc_sensor_frequency_to_length(f, &l) == SSILKC_OK);
  CHECK(l == doctest::Approx(180.0).epsilon(1e-12));
  CHECK(ssilkc_sensor_frequency_to_length(1e12, &l) == SSILKC_ERR_DOMAIN);
}

TEST_CASE("environment handle") {
  ssilkc_env* env = nullptr;
  REQUIRE(ssilkc_env_create(0, 0, &env) == SSILKC_OK);
  double target[9];
  for (double& t : target) t = 190.0;
  int settled = 0, ticks = 0;
  REQUIRE(ssilkc_env_track(env, target, &settled, &ticks) == SSILKC_OK);
  CHECK(settled == 1);
  CHECK(ticks > 0);
  double springs[9], p_model[6], p_true[6];
  REQUIRE(ssilkc_env_springs(env, springs) == SSILKC_OK);
  for (double s : springs) CHECK(std::abs(s - 190.0) < 0.5);
  REQUIRE(ssilkc_env_pose(env, 0, p_model) == SSILKC_OK);
  REQUIRE(ssilkc_env_pose(env, 1, p_true) == SSILKC_OK);
  for (int i = 0; i < 6; ++i) CHECK(p_model[i] == p_true[i]);
  CHECK(ssilkc_env_set_load(env, -5.0) != SSILKC_OK);
  ssilkc_env_destroy(env);
  ssilkc_env_destroy(nullptr);

  ssilkc_env* real = nullptr;
  REQUIRE(ssilkc_env_create(1, 3, &real) == SSILKC_OK);
  REQUIRE(ssilkc_env_pose(real, 0, p_model) == SSILKC_OK);
  REQUIRE(ssilkc_env_pose(real, 1, p_true) == SSILKC_OK);
  CHECK(std::hypot(p_model[0] - p_true[0], p_model[1] - p_true[1], p_model[2] - p_true[2]) > 0.0);
  ssilkc_env_destroy(real);
}

TEST_CASE("checkpoint loading errors") {
  ssilkc_policy* policy = nullptr;
  CHECK(ssilkc_policy_load("/nonexistent/actor.bin", &policy) == SSILKC_ERR_IO);
  CHECK(policy == nullptr);
  ssilkc_s2r* s2r = nullptr;
  CHECK(ssilkc_s2r_load("/nonexistent/s2r.bin", &s2r) == SSILKC_ERR_IO);
}

TEST_CASE("config resolution uses the size protocol") {
  size_t needed = 0;
  CHECK(ssilkc_config_resolve("{\"seed\": 4}", nullptr, nullptr, 0, &needed) == SSILKC_ERR_BUFFER_TOO_SMALL);
  REQUIRE(needed > 10);
  std::vector<char> buf(needed);
  REQUIRE(ssilkc_config_resolve("{\"seed\": 4}", "{\"out\": \"x\"}", buf.data(), buf.size(), &needed) == SSILKC_OK);
  const std::string text(buf.data());
  CHECK(text.find("\"seed\": 4") != std::string::npos);
  CHECK(text.find("\"out\": \"x\"") != std::string::npos);
  CHECK(ssilkc_config_resolve("{\"sed\": 4}", nullptr, buf.data(), buf.size(), &needed) ==
        SSILKC_ERR_INVALID_ARGUMENT);
  CHECK(ssilkc_config_resolve("{ not json", nullptr, buf.data(), buf.size(), &needed) == SSILKC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("experiments through the C boundary") {
  const fs::path dir = fs::temp_directory_path() / "ssilkc_capi_test";
  fs::remove_all(dir);
  const std::string ov = "{\"out\": \"" + dir.string() + "\"}";
  std::vector<char> buf(1 << 20);
  size_t needed = 0;
  REQUIRE(ssilkc_run_experiment("workspace", "", ov.c_str(), buf.data(), buf.size(), &needed) == SSILKC_OK);
  CHECK(std::string(buf.data()).find("lateral_coverage_mm") != std::string::npos);
  CHECK(fs::exists(dir / "metrics.json"));
  CHECK(fs::exists(dir / "config.json"));
  CHECK(ssilkc_run_experiment("dance", "", ov.c_str(), buf.data(), buf.size(), &needed) ==
        SSILKC_ERR_INVALID_ARGUMENT);
  CHECK(ssilkc_run_experiment("pickplace", "", ov.c_str(), buf.data(), buf.size(), &needed) == SSILKC_ERR_IO);
  CHECK(std::string(ssilkc_last_error()).find("record-demo") != std::string::npos);

  REQUIRE(ssilkc_run_experiment("record-demo", "", ov.c_str(), buf.data(), buf.size(), &needed) == SSILKC_OK);
  CHECK(fs::exists(dir / "demo.jsonl"));
  fs::remove_all(dir);
}

TEST_CASE("server lifecycle") {
  ssilkc_server* server = nullptr;
  REQUIRE(ssilkc_server_create("", "{\"serve\": {\"port\": 0}}", &server) == SSILKC_OK);
  int port = 0;
  REQUIRE(ssilkc_server_start(server, &port) == SSILKC_OK);
  CHECK(port > 0);
  CHECK(ssilkc_server_stop(server) == SSILKC_OK);
  ssilkc_server_destroy(server);
  CHECK(ssilkc_server_create("", "{\"serve\": {\"port\": -3}}", &server) == SSILKC_ERR_INVALID_ARGUMENT);
}
