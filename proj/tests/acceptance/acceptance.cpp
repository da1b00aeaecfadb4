// Acceptance report: one PASS/FAIL line per criterion.
//
//   ssilkc_acceptance [--tier fast|full] [--out DIR] [--only NAME]...
//
// The fast tier runs every criterion that completes in about a minute; the
// training criteria (circle, s2r_ablation, gail_vs_reward) need --tier full
// and are listed as NOT RUN otherwise. Exit status is 0 when every criterion
// that ran passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "CLI11.hpp"
#include "arm/arm_sim.hpp"
#include "control/pid.hpp"
#include "fk_oracle.hpp"
#include "gradcheck.hpp"
#include "harness/experiments.hpp"
#include "learn/shapes.hpp"
#include "rl/rl_types.hpp"
#include "sensor/sensor_model.hpp"

namespace fs = std::filesystem;
using namespace ssilkc;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double limit_s;  // wall-clock limit, seconds
  bool full_only;
  std::function<Outcome(const fs::path&)> run;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

harness::ExperimentConfig config_in(const fs::path& dir) {
  harness::ExperimentConfig cfg;
  cfg.out = dir.string();
  return cfg;
}

Outcome sensor_round_trip(const fs::path&) {
  const sensor::SensorModel m;
  const double f_res = m.resonance_frequency();
  double worst = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double f = f_res * k / 1001.0;
    worst = std::max(worst, std::abs(m.length_to_frequency(m.frequency_to_length(f)) - f) / f);
  }
  for (int k = 0; k <= 1000; ++k) {
    const double l = 100.0 + 0.14 * k;
    worst = std::max(worst, std::abs(m.frequency_to_length(m.length_to_frequency(l)) - l) / l);
  }
  return {worst < 1e-9, "max_rel_err=" + fmt(worst, 3) + " (tol 1e-9)"};
}

Outcome fk_oracle(const fs::path&) {
  const arm::ArmParams p = arm::calibrated_params();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(p.chamber_min, p.chamber_max);
  double worst = 0.0, mirror = 0.0, rotate = 0.0, straight = 0.0;
  const Eigen::Matrix3d plus120 =
      Eigen::AngleAxisd(2.0 * std::numbers::pi / 3.0, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  for (int trial = 0; trial < 100; ++trial) {
    arm::ChamberVec l{};
    for (auto& v : l) v = u(rng);
    const Eigen::Vector3d tip = arm::forward_kinematics(l, p).position();
    worst = std::max(worst, (tip - testing::integrate_tip(l, p.chamber_offset_radius, 500)).norm());

    arm::ChamberVec swapped = l, cycled{};
    for (int s = 0; s < 3; ++s) {
      std::swap(swapped[3 * s + 1], swapped[3 * s + 2]);
      cycled[3 * s] = l[3 * s + 1];
      cycled[3 * s + 1] = l[3 * s + 2];
      cycled[3 * s + 2] = l[3 * s];
    }
    const Eigen::Vector3d m = arm::forward_kinematics(swapped, p).position();
    mirror = std::max(mirror, (m - Eigen::Vector3d(tip.x(), -tip.y(), tip.z())).norm());
    rotate = std::max(rotate, (arm::forward_kinematics(cycled, p).position() - plus120 * tip).norm());

    arm::ChamberVec equal{};
    for (int s = 0; s < 3; ++s) equal[3 * s] = equal[3 * s + 1] = equal[3 * s + 2] = l[3 * s];
    const arm::Pose6D e = arm::forward_kinematics(equal, p);
    straight = std::max({straight, std::abs(e.x), std::abs(e.y)});
  }
  const bool pass = worst < 0.01 && mirror < 1e-9 && rotate < 1e-9 && straight == 0.0;
  return {pass, "max_tip_err=" + fmt(worst, 3) + "mm (tol 0.01) mirror=" + fmt(mirror, 2) + "mm rot120=" +
                    fmt(rotate, 2) + "mm straight_xy=" + fmt(straight, 2) + "mm"};
}

Outcome workspace(const fs::path& dir) {
  const json m = harness::run_command("workspace", config_in(dir / "workspace"))["metrics"];
  const double v = m["vertical_coverage_mm"], lat = m["lateral_coverage_mm"], bend = m["max_bend_deg"];
  const long n = m["samples"];
  const bool pass = n == 19683 && std::abs(v - 350.0) <= 50.0 && std::abs(lat - 400.0) <= 60.0 &&
                    std::abs(bend - 95.0) <= 10.0;
  return {pass, "samples=" + std::to_string(n) + " vertical=" + fmt(v) + "mm (350+-50) lateral=" + fmt(lat) +
                    "mm (400+-60) bend=" + fmt(bend) + "deg (95+-10)"};
}

Outcome gradient_checks(const fs::path&) {
  double worst = 0.0;
  long checked = 0, kinks = 0;
  std::uint64_t seed = 500;
  for (const auto& shape : learn::network_catalog()) {
    std::mt19937_64 rng(seed++);
    learn::MLP net = learn::make_network(shape, rng);
    const auto rep = testing::backward_fd_report(net, 2, seed);
    worst = std::max(worst, rep.max_relative_error);
    checked += rep.checked;
    kinks += rep.skipped_kinks;
  }
  std::mt19937_64 rng(seed);
  learn::MLP disc = learn::make_network(learn::discriminator_shape(), rng);
  const auto gp = testing::penalty_fd_report(disc, 4, 27, seed + 1);
  const bool pass = worst < 1e-4 && gp.max_relative_error < 1e-4 && kinks * 1000 < checked;
  return {pass, "max_rel_err=" + fmt(worst, 3) + " gp_max_rel_err=" + fmt(gp.max_relative_error, 3) +
                    " (tol 1e-4) params_checked=" + std::to_string(checked + gp.checked)};
}

Outcome reward_relabel(const fs::path&) {
  const rl::RLConfig cfg;
  long mismatches = 0, cases = 0;
  for (double e : {0.0, 0.01, 0.0299999, 0.03, 0.05, 0.4, 3.0}) {
    for (bool sat : {false, true}) {
      for (int n : {0, 1, 7, 49}) {
        rl::Transition t;
        t.s_next.scaled_error = {e, 0, 0, 0, 0, 0};
        t.step = n;
        const double expected = e < 0.03 ? 100.0 : sat ? -100.0 : -10.0 * e - 0.1 * n;
        if (std::abs(rl::compute_reward(t, sat, cfg) - expected) > 1e-12) ++mismatches;
        ++cases;
      }
    }
  }
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-200, 200), ang(-180, 180);
  auto pose = [&] { return arm::Pose6D{pos(rng), pos(rng), 300 + pos(rng), ang(rng), ang(rng), ang(rng)}; };
  long bad_relabels = 0;
  for (int k = 0; k < 500; ++k) {
    rl::Transition t;
    t.s = rl::build_state(pose(), pose(), cfg);
    t.s_next = rl::build_state(pose(), t.s.goal, cfg);
    t.step = k % 50;
    const rl::Transition r = rl::relabel_goal(t, cfg);
    if (!(r.reward == 100.0 && r.s_next.error_norm() == 0.0 && r.done && r.goal() == t.s_next.pose)) ++bad_relabels;
  }
  return {mismatches == 0 && bad_relabels == 0, "grid_mismatches=" + std::to_string(mismatches) + "/" +
                                                    std::to_string(cases) + " bad_relabels=" +
                                                    std::to_string(bad_relabels) + "/500"};
}

Outcome load_independence(const fs::path&) {
  const arm::ChamberVec target{190, 205, 215, 195, 200, 210, 185, 210, 205};
  std::vector<arm::ChamberVec> springs, pressures;
  bool settled = true;
  for (double grams : {0.0, 250.0, 500.0}) {
    control::ArmEnv env;
    env.set_load_mass(grams);
    const auto res = control::pid_track(env, target, control::PIDConfig{});
    settled = settled && res.settled;
    springs.push_back(env.spring_lengths());
    pressures.push_back(res.final_pressures);
  }
  double spring_dev = 0.0, dp = 0.0;
  for (std::size_t k = 1; k < springs.size(); ++k) {
    for (std::size_t i = 0; i < 9; ++i) {
      spring_dev = std::max(spring_dev, std::abs(springs[k][i] - springs[0][i]));
      dp = std::max(dp, std::abs(pressures[k][i] - pressures[0][i]));
    }
  }
  return {settled && spring_dev < 0.5 && dp > 1.0,
          "max_spring_dev=" + fmt(spring_dev, 3) + "mm (tol 0.5) max_dp=" + fmt(dp, 3) + "kPa (min 1)"};
}

Outcome gp_ablation(const fs::path& dir) {
  const json m = harness::run_gp_ablation(config_in(dir / "gp"));
  double with = -1, without = -1;
  for (const auto& r : m["runs"]) (r["gp_weight"].get<double>() > 0 ? with : without) = r["mean_abs_deviation"];
  return {with >= 0 && without >= 0 && with < without,
          "mean|D-0.5| lambda20=" + fmt(with) + " lambda0=" + fmt(without) + " (updates 100-500)"};
}

Outcome determinism(const fs::path& dir) {
  auto run = [&](const std::string& tag) {
    harness::ExperimentConfig cfg = config_in(dir / ("determinism_" + tag));
    cfg.circle.phase1_steps = 600;
    cfg.circle.phase2_steps = 600;
    cfg.circle.eval_points = 8;
    cfg.train.learning_starts = 200;
    cfg.s2r.samples = 600;
    cfg.pickplace.steps = 600;
    cfg.pickplace.eval_every = 300;
    cfg.pickplace.run_reuse = false;
    std::string bytes;
    for (const char* cmd : {"workspace", "train-circle", "train-s2r", "record-demo", "pickplace"}) {
      harness::run_command(cmd, cfg);
      bytes += read_file(fs::path(cfg.out) / "metrics.json");
    }
    bytes += read_file(fs::path(cfg.out) / "actor.bin");
    harness::ExperimentConfig eval = cfg;
    eval.out = (fs::path(cfg.out) / "eval").string();
    eval.actor = (fs::path(cfg.out) / "actor.bin").string();
    eval.s2r_model = (fs::path(cfg.out) / "s2r.bin").string();
    eval.eval_reality = true;
    harness::run_command("eval-path", eval);
    bytes += read_file(fs::path(eval.out) / "metrics.json");
    return bytes;
  };
  const std::string a = run("a"), b = run("b");
  return {!a.empty() && a == b, "metrics+actor bytes " + std::string(a == b ? "identical" : "differ") + " (" +
                                    std::to_string(a.size()) + " bytes)"};
}

Outcome circle(const fs::path& dir) {
  const json m = harness::run_command("train-circle", config_in(dir / "circle"))["metrics"]["nominal"];
  const double rmse = m["rmse_translation_mm"];
  return {rmse <= 8.0, "rmse=" + fmt(rmse) + "mm (tol 8) successes=" + std::to_string(m["successes"].get<long>()) +
                           "/" + std::to_string(m["waypoints"].get<long>())};
}

Outcome s2r_ablation(const fs::path& dir) {
  harness::ExperimentConfig cfg = config_in(dir / "s2r_ablation");
  cfg.circle.ablation_s2r = true;
  const json m = harness::run_command("train-circle", cfg)["metrics"];
  const double without = m["reality_without_s2r"]["rmse_translation_mm"];
  const double with = m["reality_with_s2r"]["rmse_translation_mm"];
  const double ratio = m["s2r_error_ratio"];
  return {ratio >= 1.25, "without_s2r=" + fmt(without) + "mm with_s2r=" + fmt(with) + "mm ratio=" + fmt(ratio) +
                             " (min 1.25)"};
}

Outcome gail_vs_reward(const fs::path& dir) {
  harness::ExperimentConfig cfg = config_in(dir / "pickplace");
  cfg.pickplace.run_reuse = false;
  harness::run_command("record-demo", cfg);
  const json m = harness::run_command("pickplace", cfg)["metrics"];
  const double g = m["gail"]["success_rate"], b = m["baseline"]["success_rate"];
  const bool clean = m["gail"]["successful_rollouts_collision_free"];
  return {g >= b && clean, "gail_success=" + fmt(g) + " baseline_success=" + fmt(b) +
                               " gail_successful_rollouts_collision_free=" + (clean ? "true" : "false")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SS-ILKC acceptance report"};
  std::string tier = "fast";
  std::string out = "acceptance_out";
  std::vector<std::string> only;
  app.add_option("--tier", tier, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  app.add_option("--out", out, "directory for experiment artifacts");
  app.add_option("--only", only, "run only the named criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"sensor_round_trip", 1, false, sensor_round_trip},
      {"fk_oracle", 5, false, fk_oracle},
      {"workspace", 30, false, workspace},
      {"gradient_checks", 30, false, gradient_checks},
      {"reward_relabel", 5, false, reward_relabel},
      {"load_independence", 10, false, load_independence},
      {"circle", 30 * 60, true, circle},
      {"s2r_ablation", 45 * 60, true, s2r_ablation},
      {"gail_vs_reward", 60 * 60, true, gail_vs_reward},
      {"gp_ablation", 10 * 60, false, gp_ablation},
      {"determinism", 0, false, determinism},
  };

  const fs::path dir(out);
  fs::create_directories(dir);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    if (c.full_only && tier != "full") {
      std::cout << "NOT RUN " << std::left << std::setw(18) << c.name << " needs --tier full\n" << std::flush;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(dir);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s <= 0 || secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::cout << (pass ? "PASS    " : "FAIL    ") << std::left << std::setw(18) << c.name << " " << o.detail
              << " time=" << fmt(secs, 3) << "s";
    if (c.limit_s > 0) std::cout << " (limit " << fmt(c.limit_s, 5) << "s)";
    std::cout << "\n" << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
