#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "rl/replay_buffer.hpp"
#include "rl/tqc.hpp"
#include "rl/trainer.hpp"

using namespace ssilkc;
using namespace ssilkc::rl;

namespace {

Transition with_next_error(double e, int step) {
  Transition t;
  t.s_next.scaled_error = {e, 0, 0, 0, 0, 0};
  t.step = step;
  return t;
}

Pose6D random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-200, 200), ang(-180, 180);
  return {pos(rng), pos(rng), 300 + pos(rng), ang(rng), ang(rng), ang(rng)};
}

}  // namespace

TEST_CASE("reward branch grid") {
  const RLConfig cfg;
  for (double e : {0.0, 0.01, 0.0299999, 0.03, 0.05, 0.4, 3.0}) {
    for (bool sat : {false, true}) {
      for (int n : {0, 1, 7, 49}) {
        CAPTURE(e);
        CAPTURE(sat);
        CAPTURE(n);
        double expected;
        if (e < 0.03)
          expected = 100.0;
        else if (sat)
          expected = -100.0;
        else
          expected = -10.0 * e - 0.1 * n;
        CHECK(compute_reward(with_next_error(e, n), sat, cfg) == doctest::Approx(expected).epsilon(1e-14));
      }
    }
  }
  CHECK(reward_branch(0.0299, true, cfg) == RewardBranch::GoalReached);
  CHECK(reward_branch(0.03, true, cfg) == RewardBranch::Saturated);
  CHECK(reward_branch(0.03, false, cfg) == RewardBranch::Shaped);
  CHECK_THROWS_AS((void)compute_reward(with_next_error(1.0, -1), false, cfg), std::domain_error);
}

TEST_CASE("scaled error uses per-axis weights and wrapped angles") {
  const RLConfig cfg;
  const Pose6D pose{10, -20, 500, 179, -90, 0};
  const Pose6D goal{-5, 30, 480, -179, 90, 45};
  const RLState s = build_state(pose, goal, cfg);
  const double expected[6] = {0.0056 * 15, 0.0056 * -50, 0.0056 * 20, 0.001 * -2, 0.001 * 180, 0.001 * -45};
  for (int i = 0; i < 6; ++i) CHECK(s.scaled_error[static_cast<std::size_t>(i)] == doctest::Approx(expected[i]));
  double sq = 0;
  for (double v : expected) sq += v * v;
  CHECK(s.error_norm() == doctest::Approx(std::sqrt(sq)));
}

TEST_CASE("hindsight relabel gives the goal reward with zero error") {
  const RLConfig cfg;
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    Transition t;
    t.s = build_state(random_pose(rng), random_pose(rng), cfg);
    t.s_next = build_state(random_pose(rng), t.s.goal, cfg);
    t.step = k % 50;
    t.reward = compute_reward(t, k % 3 == 0, cfg);
    const Transition r = relabel_goal(t, cfg);
    CHECK(r.reward == 100.0);
    CHECK(r.done);
    CHECK(r.relabeled);
    CHECK(r.goal() == t.s_next.pose);
    CHECK(r.s_next.error_norm() == 0.0);
    CHECK(compute_reward(r, true, cfg) == 100.0);
    CHECK(r.s.pose == t.s.pose);
    CHECK(r.action == t.action);
  }
}

TEST_CASE("action band covers the chamber range") {
  const sensor::SensorModel sensor;
  const arm::ArmParams params = arm::calibrated_params();
  const ActionCodec codec = ActionCodec::for_arm(sensor, params);
  CHECK(sensor.map(codec.band().lo) == doctest::Approx(params.chamber_min).epsilon(1e-12));
  CHECK(sensor.map(codec.band().hi) == doctest::Approx(params.chamber_max).epsilon(1e-12));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u01(-1.5, 1.5);
  for (int k = 0; k < 100; ++k) {
    ChamberVec u{};
    for (double& v : u) v = u01(rng);
    const auto f = codec.to_frequencies(u);
    const auto back = codec.to_normalized(f);
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(f[i] > codec.band().lo);
      CHECK(f[i] < codec.band().hi);
      const double l = sensor.map(f[i]);
      CHECK(l >= params.chamber_min);
      CHECK(l <= params.chamber_max);
      if (std::abs(u[i]) < 0.999) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("truncated targets drop the largest pooled atoms") {
  Eigen::MatrixXd pooled(5, 2);
  pooled << 3, -1, 9, 4, -2, 0, 7, 2, 1, 8;
  const Eigen::VectorXd reward = Eigen::Vector2d(1.0, -2.0);
  const Eigen::VectorXd done = Eigen::Vector2d(0.0, 1.0);
  const Eigen::VectorXd ent = Eigen::Vector2d(0.5, 0.25);
  const Eigen::MatrixXd t = truncated_targets(pooled, reward, done, ent, 0.9, 2);
  REQUIRE(t.rows() == 3);
  // column 0 sorted: -2 1 3 | 7 9 dropped
  const double c0[3] = {-2, 1, 3};
  for (int a = 0; a < 3; ++a) CHECK(t(a, 0) == doctest::Approx(1.0 + 0.9 * (c0[a] - 0.5)));
  for (int a = 0; a < 3; ++a) CHECK(t(a, 1) == -2.0);
  CHECK_THROWS_AS(truncated_targets(pooled, reward, done, ent, 0.9, 5), std::domain_error);

  const TQCConfig cfg;
  CHECK(cfg.pooled_atoms() == 50);
  CHECK(cfg.kept_atoms() == 46);
}

TEST_CASE("quantile Huber loss value and gradient") {
  Eigen::MatrixXd cur(1, 1), tgt(2, 1);
  cur << 0.0;
  tgt << 0.5, -3.0;
  // tau = 0.5: 0.5 * (0.5 * 0.25) + 0.5 * (3 - 0.5), over 2 atoms
  CHECK(quantile_huber_loss(cur, tgt, nullptr) == doctest::Approx((0.0625 + 1.25) / 2.0));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 2);
  Eigen::MatrixXd c(5, 3), a(7, 3);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = n(rng);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  Eigen::MatrixXd g;
  quantile_huber_loss(c, a, &g);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    Eigen::MatrixXd up = c, dn = c;
    up.data()[i] += 1e-6;
    dn.data()[i] -= 1e-6;
    const double fd = (quantile_huber_loss(up, a, nullptr) - quantile_huber_loss(dn, a, nullptr)) / 2e-6;
    CHECK(g.data()[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("replay buffer quotas") {
  ReplayBuffer buf(1000);
  for (int i = 0; i < 600; ++i) {
    Transition t;
    t.goal_id = i < 400 ? 0 : (i < 550 ? 1 : 2);
    t.reward = i % 10 == 0 ? 100.0 : -1.0;
    buf.add(t);
  }
  CHECK(buf.goal_counts().at(0) == 400);
  CHECK(buf.reward_bearing_count(100.0) == 60);
  const auto q = buf.uniform_quotas();
  CHECK(q.size() == 3);
  CHECK(q.at(1) == doctest::Approx(1.0 / 3.0));

  std::mt19937_64 rng(1);
  ReplayBuffer kept = buf;
  kept.retain(90, q, rng);
  CHECK(kept.size() == 90);
  for (const auto& [g, n] : kept.goal_counts()) CHECK(n == 30);

  kept = buf;
  kept.retain(300, q, rng);
  CHECK(kept.goal_counts().at(2) == 50);  // goal 2 contributes all it has
  CHECK(kept.goal_counts().at(0) == 100);

  kept = buf;
  kept.rebalance(q, rng);
  for (const auto& [g, n] : kept.goal_counts()) CHECK(n == 50);

  ReplayBuffer ring(10);
  for (int i = 0; i < 25; ++i) {
    Transition t;
    t.step = i;
    ring.add(t);
  }
  CHECK(ring.size() == 10);
  std::vector<int> steps;
  for (std::size_t i = 0; i < ring.size(); ++i) steps.push_back(ring.at(i).step);
  std::sort(steps.begin(), steps.end());
  CHECK(steps.front() == 15);
  CHECK(steps.back() == 24);
}

TEST_CASE("agent updates are deterministic and finite") {
  auto run = [] {
    TQCConfig cfg;
    cfg.batch_size = 16;
    cfg.hidden = 32;
    TQCAgent agent(cfg, ActionCodec::for_arm(sensor::SensorModel{}, arm::calibrated_params()), 11);
    std::mt19937_64 rng(2);
    ReplayBuffer buf;
    const RLConfig rl;
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 64; ++i) {
      Transition t;
      t.s = build_state(random_pose(rng), random_pose(rng), rl);
      t.s_next = build_state(random_pose(rng), t.s.goal, rl);
      for (double& v : t.action_u) v = u(rng);
      t.reward = compute_reward(t, false, rl);
      buf.add(t);
    }
    TQCLosses last;
    for (int k = 0; k < 20; ++k) last = agent.update(make_batch(buf.sample(16, rng)));
    CHECK(std::isfinite(last.critic_loss));
    CHECK(std::isfinite(last.actor_loss));
    CHECK(last.entropy_coef > 0);
    return agent.actor().flat_parameters();
  };
  CHECK(run() == run());
}

TEST_CASE("short training run fills the buffer with relabeled copies") {
  TrainingSetup setup;
  setup.seed = 5;
  setup.options.total_steps = 200;
  setup.options.learning_starts = 100;
  setup.tqc.batch_size = 32;
  setup.tqc.hidden = 32;
  const std::vector<Pose6D> goals{arm::forward_kinematics(std::vector<double>(9, 190.0), setup.arm)};
  auto run = [&] {
    TQCAgent agent(setup.tqc, ActionCodec::for_arm(setup.sensor, setup.arm), 1);
    ReplayBuffer buf;
    TrainingLog log;
    const auto r = train_multigoal(setup, goals, agent, buf, log);
    CHECK(r.steps == 200);
    CHECK(buf.size() == 400);
    std::size_t relabeled = 0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
      const auto& t = buf.at(i);
      if (t.relabeled) {
        ++relabeled;
        CHECK(t.reward == 100.0);
      } else {
        CHECK(t.reward == doctest::Approx(compute_reward(t, t.saturated, setup.rl)));
      }
    }
    CHECK(relabeled == 200);
    return agent.actor().flat_parameters();
  };
  CHECK(run() == run());
}
