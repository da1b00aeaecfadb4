#include "rl/trainer.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace ssilkc::rl {

namespace {

struct Worker {
  Worker(control::ArmEnv e, std::uint64_t seed) : env(std::move(e)), rng(seed) {}
  control::ArmEnv env;
  std::mt19937_64 rng;
  bool need_reset = true;
  int goal_id = -1;
  int step = 0;
  int consecutive_saturation = 0;
  Pose6D pose;
};

struct StepOutput {
  std::vector<Transition> transitions;
  std::optional<EpisodeRecord> finished;
};

StepOutput run_worker_step(Worker& w, const TrainingSetup& setup, const std::vector<Pose6D>& goals,
                           const Policy& policy, bool random_action, const RewardHooks& hooks) {
  const RLConfig& cfg = setup.rl;
  StepOutput out;
  if (w.need_reset) {
    std::uniform_int_distribution<int> pick_goal(0, static_cast<int>(goals.size()) - 1);
    w.goal_id = pick_goal(w.rng);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(w.rng) < setup.options.random_start_prob) {
      w.env.reset(sample_goal(setup.start_bounds, setup.arm, w.rng).chamber_lengths);
    } else {
      w.env.reset_straight();
    }
    w.pose = setup.observe(w.env);
    w.step = 0;
    w.consecutive_saturation = 0;
    w.need_reset = false;
  }
  const Pose6D& goal = goals[static_cast<std::size_t>(w.goal_id)];
  Transition t;
  t.s = build_state(w.pose, goal, cfg);
  ChamberVec u{};
  if (random_action) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto& v : u) v = uni(w.rng);
  } else {
    u = policy.act_normalized(t.s, false, w.rng);
  }
  t.action = policy.codec().to_frequencies(u);
  t.action_u = policy.codec().to_normalized(t.action);
  StepResult res;
  try {
    res = sensor_space_step(w.env, t.action, setup.pid, setup.observe);
  } catch (const std::exception& e) {
    throw std::runtime_error("episode step " + std::to_string(w.step) + " (goal " + std::to_string(w.goal_id) +
                             ") failed: " + e.what());
  }
  t.s_next = build_state(res.pose, goal, cfg);
  t.step = w.step + 1;
  t.saturated = res.saturated;
  t.goal_id = w.goal_id;
  t.reward = hooks.reward ? hooks.reward(t) : compute_reward(t, res.saturated, cfg);
  const bool success = t.s_next.error_norm() < cfg.threshold;
  w.consecutive_saturation = res.saturated ? w.consecutive_saturation + 1 : 0;
  const bool saturation_stop =
      setup.options.terminate_on_saturation && w.consecutive_saturation > cfg.max_consecutive_saturation;
  t.done = success || saturation_stop;
  out.transitions.push_back(t);
  if (setup.options.relabel) {
    Transition r = relabel_goal(t, cfg);
    if (hooks.reward) r.reward = hooks.reward(r);
    out.transitions.push_back(r);
  }
  w.pose = res.pose;
  ++w.step;
  if (t.done || w.step >= cfg.horizon) {
    EpisodeRecord rec;
    rec.goal_id = w.goal_id;
    rec.success = success;
    rec.final_error_norm = t.s_next.error_norm();
    out.finished = rec;
    w.need_reset = true;
  }
  return out;
}

}  // namespace

PoseObserver model_pose_observer() {
  return [](control::ArmEnv& env) { return env.model_pose(); };
}

StepResult sensor_space_step(control::ArmEnv& env, const ChamberVec& frequencies, const control::PIDConfig& pid,
                             const PoseObserver& observe, const control::TickObserver& tick_observer) {
  const ChamberVec reference = env.sensor().map(frequencies);
  const control::PidResult r = control::pid_track(env, reference, pid, tick_observer);
  StepResult out;
  out.settled = r.settled;
  out.saturated = r.saturated_at_end;
  out.pose = observe(env);
  return out;
}

void TrainingLog::write_jsonl(std::ostream& out) const {
  for (const auto& e : episodes) {
    nlohmann::json j;
    j["step"] = e.step;
    j["goal_id"] = e.goal_id;
    j["success"] = e.success;
    j["critic_loss"] = e.critic_loss;
    j["actor_loss"] = e.actor_loss;
    j["entropy_coef"] = e.entropy_coef;
    out << j.dump() << '\n';
  }
}

double TrainingLog::recent_success_rate(int window) const {
  std::map<int, std::vector<bool>> by_goal;
  for (const auto& e : episodes) by_goal[e.goal_id].push_back(e.success);
  if (by_goal.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [g, v] : by_goal) {
    const std::size_t n = std::min<std::size_t>(v.size(), static_cast<std::size_t>(window));
    double s = 0.0;
    for (std::size_t i = v.size() - n; i < v.size(); ++i) s += v[i] ? 1.0 : 0.0;
    total += s / static_cast<double>(n);
  }
  return total / static_cast<double>(by_goal.size());
}

TrainResult train_multigoal(const TrainingSetup& setup, const std::vector<Pose6D>& goals, TQCAgent& agent,
                            ReplayBuffer& buffer, TrainingLog& log, const RewardHooks& hooks, long step_offset) {
  if (goals.empty()) throw std::invalid_argument("train_multigoal: no goals");
  setup.rl.validate();
  const TrainOptions& opt = setup.options;
  if (opt.total_steps <= 0) throw std::invalid_argument("train_multigoal: step budget must be positive");

  std::vector<Worker> workers;
  for (int k = 0; k < setup.rl.workers; ++k) {
    const std::uint64_t ws = setup.seed * 1000003ULL + static_cast<std::uint64_t>(step_offset) * 31ULL +
                             static_cast<std::uint64_t>(k) + 1ULL;
    workers.emplace_back(control::ArmEnv(setup.arm, setup.sensor), ws);
  }
  std::mt19937_64 learner_rng(setup.seed * 7919ULL + static_cast<std::uint64_t>(step_offset) + 17ULL);

  TQCLosses last;
  TrainResult result;
  long step = step_offset;
  const long end = step_offset + opt.total_steps;
  while (step < end) {
    const Policy snapshot = agent.policy();
    const int active = static_cast<int>(std::min<long>(static_cast<long>(workers.size()), end - step));
    std::vector<StepOutput> outputs(static_cast<std::size_t>(active));
    auto run = [&](int k) {
      const bool random_action = step + k < opt.learning_starts;
      outputs[static_cast<std::size_t>(k)] =
          run_worker_step(workers[static_cast<std::size_t>(k)], setup, goals, snapshot, random_action, hooks);
    };
    if (opt.parallel_rollouts && active > 1) {
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(active));
      std::vector<std::thread> threads;
      for (int k = 0; k < active; ++k) {
        threads.emplace_back([&, k] {
          try {
            run(k);
          } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
          }
        });
      }
      for (auto& th : threads) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    } else {
      for (int k = 0; k < active; ++k) run(k);
    }
    for (int k = 0; k < active; ++k) {
      auto& o = outputs[static_cast<std::size_t>(k)];
      for (const auto& t : o.transitions) buffer.add(t);
      if (o.finished) {
        EpisodeRecord rec = *o.finished;
        rec.step = step + k + 1;
        rec.critic_loss = last.critic_loss;
        rec.actor_loss = last.actor_loss;
        rec.entropy_coef = last.entropy_coef;
        log.episodes.push_back(rec);
        ++result.episodes;
      }
    }
    step += active;
    if (step >= opt.learning_starts && buffer.size() >= static_cast<std::size_t>(setup.tqc.batch_size)) {
      const long n_updates = static_cast<long>(active) * opt.updates_per_step;
      for (long k = 0; k < n_updates; ++k) {
        const auto idx = buffer.sample_indices(static_cast<std::size_t>(setup.tqc.batch_size), learner_rng);
        std::vector<Transition> batch;
        batch.reserve(idx.size());
        for (std::size_t i : idx) batch.push_back(buffer.at(i));
        if (hooks.batch_rewards) hooks.batch_rewards(batch);
        std::vector<const Transition*> ptrs;
        ptrs.reserve(batch.size());
        for (const auto& t : batch) ptrs.push_back(&t);
        last = agent.update(make_batch(ptrs));
        if (hooks.after_update) hooks.after_update(step, buffer);
      }
    }
  }
  result.steps = step - step_offset;
  return result;
}

}  // namespace ssilkc::rl
