#include "harness/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "common/errors.hpp"

namespace ssilkc::harness {

using nlohmann::json;

namespace {

/// Enum stored as text in the file.
struct ModeRef {
  gail::RewardMode* value;
};
struct RecordModeRef {
  teleop::RecordMode* value;
};

template <class F>
void visit(ExperimentConfig& c, F&& f) {
  f("", "seed", c.seed);
  f("", "out", c.out);
  f("", "scene", c.scene);
  f("", "buffer_schedule", c.buffer_schedule);
  f("", "actor", c.actor);
  f("", "s2r_model", c.s2r_model);
  f("", "deploy_max_steps", c.deploy_max_steps);
  f("", "eval_reality", c.eval_reality);

  f("rl", "w", c.rl.w);
  f("rl", "goal_reward", c.rl.goal_reward);
  f("rl", "error_weight", c.rl.error_weight);
  f("rl", "step_weight", c.rl.step_weight);
  f("rl", "saturation_penalty", c.rl.saturation_penalty);
  f("rl", "threshold", c.rl.threshold);
  f("rl", "gamma", c.rl.gamma);
  f("rl", "horizon", c.rl.horizon);
  f("rl", "workers", c.rl.workers);
  f("rl", "max_consecutive_saturation", c.rl.max_consecutive_saturation);

  f("tqc", "n_critics", c.tqc.n_critics);
  f("tqc", "quantiles_per_critic", c.tqc.quantiles_per_critic);
  f("tqc", "dropped_top_quantiles", c.tqc.dropped_top_quantiles);
  f("tqc", "target_entropy", c.tqc.target_entropy);
  f("tqc", "actor_lr", c.tqc.actor_lr);
  f("tqc", "critic_lr", c.tqc.critic_lr);
  f("tqc", "alpha_lr", c.tqc.alpha_lr);
  f("tqc", "initial_alpha", c.tqc.initial_alpha);
  f("tqc", "batch_size", c.tqc.batch_size);
  f("tqc", "tau", c.tqc.tau);
  f("tqc", "gamma", c.tqc.gamma);
  f("tqc", "hidden", c.tqc.hidden);
  f("tqc", "reward_scale", c.tqc.reward_scale);

  f("train", "learning_starts", c.train.learning_starts);
  f("train", "updates_per_step", c.train.updates_per_step);
  f("train", "random_start_prob", c.train.random_start_prob);
  f("train", "relabel", c.train.relabel);
  f("train", "terminate_on_saturation", c.train.terminate_on_saturation);
  f("train", "parallel_rollouts", c.train.parallel_rollouts);

  f("pid", "kp", c.pid.kp);
  f("pid", "ki", c.pid.ki);
  f("pid", "kd", c.pid.kd);
  f("pid", "integral_clamp", c.pid.integral_clamp);
  f("pid", "settle_tolerance", c.pid.settle_tolerance);
  f("pid", "settle_budget", c.pid.settle_budget);

  f("s2r", "samples", c.s2r.samples);
  f("s2r", "learning_rate", c.s2r.train.learning_rate);
  f("s2r", "batch", c.s2r.train.batch);
  f("s2r", "epochs", c.s2r.train.epochs);
  f("s2r", "hidden", c.s2r.train.hidden);
  f("s2r", "holdout_fraction", c.s2r.train.holdout_fraction);
  f("s2r", "stiffness_scale", c.s2r.perturbation.stiffness_scale);
  f("s2r", "length_bias", c.s2r.perturbation.length_bias);
  f("s2r", "pose_noise_sigma", c.s2r.perturbation.pose_noise_sigma);

  f("gail", "gp_weight", c.gail.gp_weight);
  f("gail", "learning_rate", c.gail.learning_rate);
  f("gail", "batch", c.gail.batch);
  f("gail", "hidden", c.gail.hidden);
  f("gail", "update_every", c.gail.update_every);
  f("gail", "mode", ModeRef{&c.gail.mode});

  f("circle", "radius", c.circle.radius);
  f("circle", "center_z", c.circle.center_z);
  f("circle", "train_points", c.circle.train_points);
  f("circle", "phase1_stride", c.circle.phase1_stride);
  f("circle", "eval_points", c.circle.eval_points);
  f("circle", "phase1_steps", c.circle.phase1_steps);
  f("circle", "phase2_steps", c.circle.phase2_steps);
  f("circle", "retain_fraction", c.circle.retain_fraction);
  f("circle", "ablation_s2r", c.circle.ablation_s2r);

  f("pickplace", "diameter", c.pickplace.diameter);
  f("pickplace", "reuse_diameter", c.pickplace.reuse_diameter);
  f("pickplace", "cross_height", c.pickplace.cross_height);
  f("pickplace", "steps", c.pickplace.steps);
  f("pickplace", "reuse_steps", c.pickplace.reuse_steps);
  f("pickplace", "eval_every", c.pickplace.eval_every);
  f("pickplace", "updates_per_step", c.pickplace.updates_per_step);
  f("pickplace", "demo", c.pickplace.demo);
  f("pickplace", "run_baseline", c.pickplace.run_baseline);
  f("pickplace", "run_reuse", c.pickplace.run_reuse);

  f("record_demo", "mode", c.record_demo.mode);
  f("record_demo", "diameter", c.record_demo.diameter);
  f("record_demo", "passes", c.record_demo.passes);

  f("serve", "host", c.serve.host);
  f("serve", "port", c.serve.port);
  f("serve", "publish_hz", c.serve.publish_hz);
  f("serve", "ticks_per_frame", c.serve.ticks_per_frame);
  f("serve", "tip_cap_mm", c.serve.tip_cap_mm);
  f("serve", "tip_cap_deg", c.serve.tip_cap_deg);
  f("serve", "setpoint_cap_mm", c.serve.setpoint_cap_mm);
  f("serve", "record_dir", c.serve.record_dir);
  f("serve", "record_mode", RecordModeRef{&c.serve.record_mode});
}

std::string mode_name(gail::RewardMode m) { return m == gail::RewardMode::Faithful ? "faithful" : "recompute-on-sample"; }

gail::RewardMode mode_from(const std::string& s) {
  if (s == "faithful") return gail::RewardMode::Faithful;
  if (s == "recompute-on-sample") return gail::RewardMode::RecomputeOnSample;
  throw std::invalid_argument("gail.mode must be 'faithful' or 'recompute-on-sample', got '" + s + "'");
}

std::string record_mode_name(teleop::RecordMode m) { return m == teleop::RecordMode::PerJog ? "per-jog" : "per-tick"; }

teleop::RecordMode record_mode_from(const std::string& s) {
  if (s == "per-jog") return teleop::RecordMode::PerJog;
  if (s == "per-tick") return teleop::RecordMode::PerTick;
  throw std::invalid_argument("serve.record_mode must be 'per-jog' or 'per-tick', got '" + s + "'");
}

std::string dotted(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

}  // namespace

void ExperimentConfig::validate() const {
  rl.validate();
  tqc.validate();
  pid.validate();
  s2r.train.validate();
  gail.validate();
  if (train.learning_starts < 0) throw std::invalid_argument("train.learning_starts must be non-negative");
  if (train.updates_per_step < 0) throw std::invalid_argument("train.updates_per_step must be non-negative");
  if (circle.phase1_steps <= 0 || circle.phase2_steps <= 0) throw std::invalid_argument("circle budgets must be positive");
  if (circle.train_points < 2 || circle.eval_points < 2 || circle.phase1_stride < 1)
    throw std::invalid_argument("circle point counts must be at least 2");
  if (!(circle.retain_fraction >= 0 && circle.retain_fraction <= 1))
    throw std::invalid_argument("circle.retain_fraction must lie in [0, 1]");
  if (pickplace.steps <= 0 || pickplace.reuse_steps <= 0 || pickplace.eval_every <= 0 ||
      pickplace.updates_per_step < 1)
    throw std::invalid_argument("pickplace budgets must be positive");
  if (record_demo.passes < 1) throw std::invalid_argument("record_demo.passes must be at least 1");
  if (deploy_max_steps < 1) throw std::invalid_argument("deploy_max_steps must be at least 1");
  if (s2r.samples < 100) throw std::invalid_argument("s2r.samples must be at least 100");
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  ExperimentConfig c;
  std::map<std::string, std::set<std::string>> known;
  visit(c, [&](const std::string& section, const std::string& key, auto&& ref) {
    known[section].insert(key);
    const json* node = &j;
    if (!section.empty()) {
      if (!j.contains(section)) return;
      node = &j.at(section);
    }
    if (!node->contains(key)) return;
    const json& v = node->at(key);
    using T = std::decay_t<decltype(ref)>;
    try {
      if constexpr (std::is_same_v<T, ModeRef>) {
        *ref.value = mode_from(v.get<std::string>());
      } else if constexpr (std::is_same_v<T, RecordModeRef>) {
        *ref.value = record_mode_from(v.get<std::string>());
      } else {
        ref = v.get<T>();
      }
    } catch (const json::exception& e) {
      throw std::invalid_argument("config key " + dotted(section, key) + ": " + e.what());
    }
  });
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      if (!known.count(k) || k.empty()) throw std::invalid_argument("unknown config section '" + k + "'");
      for (const auto& [kk, vv] : v.items())
        if (!known[k].count(kk)) throw std::invalid_argument("unknown config key '" + k + "." + kk + "'");
    } else if (!known[""].count(k)) {
      throw std::invalid_argument("unknown config key '" + k + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw std::runtime_error("config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  json j = json::object();
  visit(c, [&](const std::string& section, const std::string& key, auto&& ref) {
    json& node = section.empty() ? j : j[section];
    using T = std::decay_t<decltype(ref)>;
    if constexpr (std::is_same_v<T, ModeRef>) {
      node[key] = mode_name(*ref.value);
    } else if constexpr (std::is_same_v<T, RecordModeRef>) {
      node[key] = record_mode_name(*ref.value);
    } else {
      node[key] = ref;
    }
  });
  return j;
}

}  // namespace ssilkc::harness
