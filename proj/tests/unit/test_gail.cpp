#include <cmath>
#include <sstream>

#include "doctest.h"

#include "common/errors.hpp"
#include "gail/discriminator.hpp"
#include "gail/oracle.hpp"

using namespace ssilkc;
using namespace ssilkc::gail;

namespace {

Eigen::MatrixXd random_inputs(int cols, std::mt19937_64& rng, double shift = 0.0) {
  std::normal_distribution<double> n(shift, 1.0);
  Eigen::MatrixXd x(kDiscInputDim, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  return x;
}

DemoRecord record_at(double t, double spring, int sequence) {
  const arm::ArmParams params = arm::calibrated_params();
  control::ArmEnv env;
  arm::ChamberVec springs{};
  springs.fill(spring);
  env.reset(arm::chambers_from_springs(springs, params));
  DemoRecord r = snapshot_record(env, env.model_pose(), "open", "teleop", sequence);
  r.t = t;
  return r;
}

}  // namespace

TEST_CASE("discriminator reward") {
  CHECK(disc_reward_from_prob(0.5) == doctest::Approx(std::log(0.5)));
  CHECK(disc_reward_from_prob(0.0) == 0.0 + std::log(1.0 - 1e-6));
  CHECK(disc_reward_from_prob(1.0) == doctest::Approx(std::log(1e-6)));
  CHECK(disc_reward_from_prob(0.9) < disc_reward_from_prob(0.1));
}

TEST_CASE("input layout") {
  const rl::RLConfig cfg;
  const arm::Pose6D p{10, 20, 500, 5, -5, 0}, g{-30, 0, 450, 0, 10, 20};
  const rl::RLState s = rl::build_state(p, g, cfg);
  ChamberVec u{};
  for (std::size_t i = 0; i < 9; ++i) u[i] = 0.1 * static_cast<double>(i) - 0.4;
  const Eigen::VectorXd x = disc_input(s, u, g);
  REQUIRE(x.size() == 33);
  CHECK((x.head(18) - rl::state_features(s)).norm() == 0.0);
  for (int i = 0; i < 9; ++i) CHECK(x[18 + i] == u[static_cast<std::size_t>(i)]);
  CHECK((x.tail(6) - rl::pose_features(g)).norm() == 0.0);
}

TEST_CASE("interpolation mixes state and action rows only") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd e = random_inputs(6, rng), p = random_inputs(6, rng);
  std::vector<double> mus;
  const Eigen::MatrixXd m = interpolate_pairs(e, p, rng, &mus);
  REQUIRE(mus.size() == 6);
  for (Eigen::Index b = 0; b < 6; ++b) {
    const double mu = mus[static_cast<std::size_t>(b)];
    CHECK(mu >= 0.0);
    CHECK(mu <= 1.0);
    for (Eigen::Index i = 0; i < kDiscPenalizedDim; ++i)
      CHECK(m(i, b) == doctest::Approx(mu * e(i, b) + (1 - mu) * p(i, b)).epsilon(1e-14));
    for (Eigen::Index i = kDiscPenalizedDim; i < kDiscInputDim; ++i) CHECK(m(i, b) == p(i, b));
  }
  CHECK_THROWS_AS(interpolate_pairs(e, p.leftCols(5), rng), std::domain_error);
}

TEST_CASE("gradient penalty matches a finite-difference oracle") {
  GailConfig cfg;
  cfg.hidden = 16;
  const Discriminator disc(cfg, 7);
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd x = random_inputs(4, rng);
  double expected = 0.0;
  for (Eigen::Index b = 0; b < x.cols(); ++b) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < kDiscPenalizedDim; ++i) {
      Eigen::VectorXd up = x.col(b), dn = x.col(b);
      up[i] += 1e-6;
      dn[i] -= 1e-6;
      const double g = (disc.prob(up) - disc.prob(dn)) / 2e-6;
      sq += g * g;
    }
    expected += (std::sqrt(sq) - 1.0) * (std::sqrt(sq) - 1.0);
  }
  expected /= static_cast<double>(x.cols());
  CHECK(gradient_penalty(disc, x) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("discriminator separates shifted distributions") {
  GailConfig cfg;
  cfg.hidden = 32;
  cfg.learning_rate = 1e-3;
  Discriminator disc(cfg, 2);
  std::mt19937_64 rng(5);
  DiscStats first, last;
  for (int k = 0; k < 300; ++k) {
    const DiscStats st = disc_step(disc, random_inputs(64, rng, -1.0), random_inputs(64, rng, 1.0), 0.0, rng);
    if (k == 0) first = st;
    last = st;
  }
  CHECK(last.loss < first.loss);
  CHECK(last.mean_d_policy > 0.8);
  CHECK(last.mean_d_expert < 0.2);
  CHECK(last.accuracy > 0.95);
  CHECK(last.mean_abs_deviation > 0.3);
}

TEST_CASE("demo relabeling") {
  const rl::RLConfig cfg;
  const rl::ActionCodec codec = rl::ActionCodec::for_arm(sensor::SensorModel{}, arm::calibrated_params());
  std::vector<std::vector<DemoRecord>> seqs{
      {record_at(0.0, 170, 0), record_at(0.5, 180, 0), record_at(1.0, 160, 0)},
      {record_at(0.0, 170, 1)},
  };
  const DemoDataset d = relabel_demos(seqs, cfg, codec);
  REQUIRE(d.records.size() == 2);
  CHECK(d.skipped_sequences == 1);
  CHECK(d.source == "teleop");
  for (std::size_t t = 0; t < 2; ++t) {
    const auto& r = d.records[t];
    CHECK(r.goal == seqs[0][t + 1].pose);
    CHECK(r.s.pose == seqs[0][t].pose);
    const auto u = codec.to_normalized(seqs[0][t + 1].f_sensor);
    for (std::size_t i = 0; i < 9; ++i) CHECK(r.action_u[i] == doctest::Approx(u[i]));
  }
  // springs at 180 mm: every decoded action maps back to 180 mm
  const sensor::SensorModel sensor;
  const auto f = codec.to_frequencies(d.records[0].action_u);
  for (double v : f) CHECK(sensor.map(v) == doctest::Approx(180.0).epsilon(1e-9));
}

TEST_CASE("demo file round trip and errors") {
  std::vector<DemoRecord> recs{record_at(0.0, 170, 0), record_at(0.5, 180, 0)};
  std::stringstream ss;
  write_demo(ss, recs);
  std::stringstream in(ss.str());
  const DemoFile f = read_demo(in);
  REQUIRE(f.records.size() == 2);
  CHECK(f.records[1].pose == recs[1].pose);
  CHECK(f.records[1].f_sensor == recs[1].f_sensor);
  CHECK(f.records[1].source == "teleop");
  CHECK(f.sequences().size() == 1);

  std::stringstream broken(demo_header() + "\n" + format_demo_record(recs[0]) + "\n{\"t\": 1}\n");
  try {
    (void)read_demo(broken);
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::stringstream wrong("{\"format\":\"ssilkc-demo\",\"version\":9}\n");
  CHECK_THROWS_AS(read_demo(wrong), IoError);
}

TEST_CASE("faithful and recompute discriminator updates") {
  const rl::RLConfig rl;
  const rl::ActionCodec codec = rl::ActionCodec::for_arm(sensor::SensorModel{}, arm::calibrated_params());
  const DemoDataset demos =
      relabel_demos({{record_at(0.0, 170, 0), record_at(0.5, 180, 0), record_at(1.0, 160, 0)}}, rl, codec);
  std::mt19937_64 rng(9);
  rl::ReplayBuffer buffer;
  for (int i = 0; i < 300; ++i) {
    rl::Transition t;
    t.s = rl::build_state(record_at(0, 150 + (i % 50), 0).pose, demos.records[0].goal, rl);
    t.s_next = t.s;
    t.reward = 7.0;
    buffer.add(t);
  }
  GailConfig cfg;
  cfg.batch = 32;
  cfg.hidden = 16;
  Discriminator disc(cfg, 1);
  rl::ReplayBuffer recompute = buffer;
  cfg.mode = RewardMode::RecomputeOnSample;
  disc_update(disc, demos, recompute, cfg, rng);
  CHECK(recompute.size() == 300);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < recompute.size(); ++i) {
    const auto& t = recompute.at(i);
    if (t.reward != 7.0) {
      ++changed;
      CHECK(t.reward == doctest::Approx(disc_reward(disc, t.s, t.action_u, t.goal())));
    }
  }
  CHECK(changed > 0);
  CHECK(changed <= 32);

  cfg.mode = RewardMode::Faithful;
  disc_update(disc, demos, buffer, cfg, rng);
  CHECK(buffer.size() == 32);
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const auto& t = buffer.at(i);
    CHECK(t.reward == doctest::Approx(disc_reward(disc, t.s, t.action_u, t.goal())));
  }
  rl::ReplayBuffer empty;
  CHECK_THROWS_AS(disc_update(disc, demos, empty, cfg, rng), std::invalid_argument);
}

TEST_CASE("scripted oracle threads the cross pipe without contact") {
  const arm::PipeScene scene = arm::cross_pipe_scene(300.0);
  const auto recs = record_oracle_demo(cross_pipe_route(300.0), scene, OracleOptions{});
  REQUIRE(recs.size() == 21);
  const arm::ArmParams params = arm::calibrated_params();
  double prev_t = -1.0;
  for (const auto& r : recs) {
    CHECK(r.source == "scripted-oracle");
    CHECK(r.t > prev_t);
    prev_t = r.t;
    const auto report = arm::collision_check(r.chamber_lengths, scene, params);
    CHECK_FALSE(report.collides);
    CHECK(arm::forward_kinematics(r.chamber_lengths, params).translation_distance(r.pose) < 1e-9);
  }
  const auto route = cross_pipe_route(300.0);
  for (std::size_t k = 0; k < route.size(); ++k)
    CHECK((recs[k + 1].pose.position() - route[k].position).norm() < OracleOptions{}.reach_tolerance + 1e-9);

  OracleOptions opt;
  CHECK_THROWS_AS(record_oracle_demo({{Eigen::Vector3d(140, 0, 560), std::nullopt}}, scene, opt), OracleCollision);
}
