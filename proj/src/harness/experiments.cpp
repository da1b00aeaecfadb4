#include "harness/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "common/errors.hpp"
#include "arm/ik.hpp"
#include "arm/workspace.hpp"
#include "gail/oracle.hpp"
#include "learn/checkpoint.hpp"

namespace ssilkc::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path out_path(const ExperimentConfig& cfg, const std::string& name) { return fs::path(cfg.out) / name; }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
}

void write_log(const fs::path& p, const rl::TrainingLog& log) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  log.write_jsonl(out);
}

arm::PipeScene scene_or(const ExperimentConfig& cfg, const arm::PipeScene& fallback) {
  return cfg.scene.empty() ? fallback : arm::load_scene(cfg.scene);
}

rl::PoseObserver s2r_observer(const s2r::S2RModel& model) {
  return [&model](control::ArmEnv& env) { return control::observe_pose(env, &model); };
}

void progress(const std::string& msg) { std::clog << msg << std::endl; }

json curve_json(const std::vector<std::pair<long, double>>& curve) {
  json j = json::array();
  for (const auto& [s, r] : curve) j.push_back({{"step", s}, {"success_rate", r}});
  return j;
}

}  // namespace

std::vector<arm::Pose6D> circle_goals(const CircleConfig& c, int n, const arm::ArmParams& params) {
  if (n < 1) throw std::invalid_argument("circle_goals: need at least one point");
  arm::ChamberVec start{};
  start.fill(params.chamber_free_length);
  std::vector<arm::Pose6D> out;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * M_PI * k / n;
    arm::IkOptions o;
    o.tip_axis = Eigen::Vector3d::UnitZ();
    const auto sol = arm::solve_ik({c.radius * std::cos(a), c.radius * std::sin(a), c.center_z}, start, params, o);
    if (sol.position_error > 0.1)
      throw std::runtime_error("circle point " + std::to_string(k) + " is not reachable with a vertical tip");
    out.push_back(sol.pose);
  }
  return out;
}

QuotaSchedule parse_schedule(std::istream& in) {
  QuotaSchedule s;
  std::string line;
  long previous = -1;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long step;
    if (!(ls >> step)) continue;
    if (step <= previous) throw std::invalid_argument("buffer schedule: steps must increase");
    previous = step;
    std::map<int, double> quotas;
    std::string tok;
    double total = 0.0;
    while (ls >> tok) {
      if (tok == "uniform") continue;
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("buffer schedule: expected goal:share, got " + tok);
      const int goal = std::stoi(tok.substr(0, colon));
      const double share = std::stod(tok.substr(colon + 1));
      if (!(share >= 0)) throw std::invalid_argument("buffer schedule: shares must be non-negative");
      quotas[goal] = share;
      total += share;
    }
    if (total > 1.0 + 1e-9) throw std::invalid_argument("buffer schedule: shares exceed 1 at step " + std::to_string(step));
    s.rows.emplace_back(step, quotas);
  }
  return s;
}

QuotaSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open buffer schedule " + path);
  return parse_schedule(in);
}

rl::TrainResult train_scheduled(const rl::TrainingSetup& setup, const std::vector<arm::Pose6D>& goals,
                                rl::TQCAgent& agent, rl::ReplayBuffer& buffer, rl::TrainingLog& log,
                                const rl::RewardHooks& hooks, long step_offset, const QuotaSchedule& schedule,
                                std::uint64_t seed) {
  const long end = step_offset + setup.options.total_steps;
  long at = step_offset;
  rl::TrainResult total;
  std::mt19937_64 rng(seed ^ 0xb0ffe5ULL);
  auto run_until = [&](long stop) {
    if (stop <= at) return;
    rl::TrainingSetup s = setup;
    s.options.total_steps = stop - at;
    const auto r = rl::train_multigoal(s, goals, agent, buffer, log, hooks, at);
    total.steps += r.steps;
    total.episodes += r.episodes;
    at = stop;
  };
  for (const auto& [step, quotas] : schedule.rows) {
    if (step <= at || step >= end) continue;
    run_until(step);
    buffer.rebalance(quotas.empty() ? buffer.uniform_quotas() : quotas, rng);
  }
  run_until(end);
  return total;
}

rl::TrainingSetup make_setup(const ExperimentConfig& cfg) {
  rl::TrainingSetup s;
  s.rl = cfg.rl;
  s.tqc = cfg.tqc;
  s.options = cfg.train;
  s.pid = cfg.pid;
  s.seed = cfg.seed;
  return s;
}

CirclePolicy train_circle_policy(const ExperimentConfig& cfg, const rl::PoseObserver& observe, std::uint64_t seed) {
  rl::TrainingSetup setup = make_setup(cfg);
  setup.observe = observe;
  setup.seed = seed;
  const auto& c = cfg.circle;
  const auto all = circle_goals(c, c.train_points, setup.arm);
  std::vector<arm::Pose6D> first;
  for (int k = 0; k < c.train_points; k += c.phase1_stride) first.push_back(all[static_cast<std::size_t>(k)]);

  rl::TQCAgent agent(setup.tqc, rl::ActionCodec::for_arm(setup.sensor, setup.arm), seed * 7);
  rl::ReplayBuffer buffer(400000);
  CirclePolicy out;
  setup.options.total_steps = c.phase1_steps;
  rl::train_multigoal(setup, first, agent, buffer, out.log);
  out.phase1_success = out.log.recent_success_rate(20);
  progress("circle: phase 1 done, success " + std::to_string(out.phase1_success));

  for (std::size_t i = 0; i < buffer.size(); ++i) buffer.at(i).goal_id *= c.phase1_stride;
  std::mt19937_64 rng(seed + 2);
  buffer.retain(static_cast<std::size_t>(std::llround(c.retain_fraction * static_cast<double>(buffer.size()))),
                buffer.uniform_quotas(), rng);

  setup.options.total_steps = c.phase2_steps;
  setup.options.learning_starts = 0;
  const QuotaSchedule schedule = cfg.buffer_schedule.empty() ? QuotaSchedule{} : load_schedule(cfg.buffer_schedule);
  const std::size_t before = out.log.episodes.size();
  train_scheduled(setup, all, agent, buffer, out.log, {}, c.phase1_steps, schedule, seed);
  rl::TrainingLog phase2;
  phase2.episodes.assign(out.log.episodes.begin() + static_cast<std::ptrdiff_t>(before), out.log.episodes.end());
  out.phase2_success = phase2.recent_success_rate(20);
  progress("circle: phase 2 done, success " + std::to_string(out.phase2_success));
  out.policy = agent.policy();
  return out;
}

control::PathMetrics eval_circle(const ExperimentConfig& cfg, const rl::Policy& policy, const s2r::S2RModel* s2r,
                                 control::ArmEnv& env) {
  control::DeployConfig d;
  d.rl = cfg.rl;
  d.pid = cfg.pid;
  d.max_steps = cfg.deploy_max_steps;
  return control::path_follow(policy, s2r, circle_goals(cfg.circle, cfg.circle.eval_points, env.params()), env, d);
}

json path_metrics_json(const control::PathMetrics& m) {
  return {{"rmse_translation_mm", m.rmse_translation},
          {"mean_abs_yaw_deg", m.mean_abs_yaw},
          {"mean_abs_pitch_deg", m.mean_abs_pitch},
          {"mean_abs_roll_deg", m.mean_abs_roll},
          {"successes", m.success_count()},
          {"waypoints", m.success.size()},
          {"collisions", m.collisions},
          {"translation_errors_mm", m.translation_errors}};
}

SceneEval eval_in_scene(const rl::Policy& policy, const std::vector<arm::Pose6D>& goals, const arm::PipeScene& scene,
                        const ExperimentConfig& cfg) {
  control::ArmEnv env;
  control::DeployConfig d;
  d.rl = cfg.rl;
  d.pid = cfg.pid;
  d.max_steps = cfg.deploy_max_steps;
  d.scene = &scene;
  SceneEval ev;
  ev.worst_clearance = std::numeric_limits<double>::infinity();
  std::size_t ok = 0;
  for (const auto& g : goals) {
    const auto r = control::deploy_policy(policy, nullptr, g, env, d);
    const bool success = r.success && !r.collided;
    ev.reached += r.success ? 1 : 0;
    ev.collisions += r.collided ? 1 : 0;
    if (r.success && r.collided) ev.successful_rollouts_collision_free = false;
    ev.worst_clearance = std::min(ev.worst_clearance, r.worst_clearance);
    ev.success.push_back(success);
    ok += success ? 1 : 0;
  }
  ev.success_rate = goals.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(goals.size());
  return ev;
}

std::vector<gail::DemoRecord> oracle_demos(const ExperimentConfig& cfg, double diameter) {
  const arm::PipeScene scene = scene_or(cfg, arm::cross_pipe_scene(diameter, cfg.pickplace.cross_height));
  gail::OracleOptions opt;
  opt.pid = cfg.pid;
  std::vector<gail::DemoRecord> all;
  auto route = gail::cross_pipe_route(diameter, cfg.pickplace.cross_height);
  for (int pass = 0; pass < cfg.record_demo.passes; ++pass) {
    auto r = route;
    if (pass % 2 == 1)
      for (auto& w : r) w.position.x() = -w.position.x();
    auto recs = gail::record_oracle_demo(r, scene, opt, pass);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return all;
}

std::vector<arm::Pose6D> demo_goals(const std::vector<gail::DemoRecord>& records) {
  std::vector<arm::Pose6D> out;
  if (records.empty()) return out;
  const int seq = records.front().sequence;
  for (std::size_t i = 1; i < records.size() && records[i].sequence == seq; ++i) out.push_back(records[i].pose);
  return out;
}

json run_workspace(const ExperimentConfig& cfg) {
  const auto rep = arm::sweep_workspace(arm::calibrated_params(), {-40.0, 0.0, 20.0}, true);
  std::ostringstream csv;
  csv << "x_mm,y_mm,z_mm\n";
  for (const auto& t : rep.tips) csv << t.x << ',' << t.y << ',' << t.z << '\n';
  write_text(out_path(cfg, "workspace_tips.csv"), csv.str());
  return {{"samples", rep.samples},
          {"vertical_coverage_mm", rep.vertical_coverage},
          {"lateral_coverage_mm", rep.lateral_coverage},
          {"z_extent_mm", rep.z_extent},
          {"max_bend_deg", rep.max_bend}};
}

json run_train_circle(const ExperimentConfig& cfg) {
  json m;
  const CirclePolicy nominal = train_circle_policy(cfg, rl::model_pose_observer(), cfg.seed);
  learn::save_checkpoint(out_path(cfg, "actor.bin").string(), nominal.policy.net());
  write_log(out_path(cfg, "train_log.jsonl"), nominal.log);
  control::ArmEnv sim;
  const auto eval = eval_circle(cfg, nominal.policy, nullptr, sim);
  write_text(out_path(cfg, "trajectory.csv"), eval.log.to_csv());
  m["phase1_success_rate"] = nominal.phase1_success;
  m["phase2_success_rate"] = nominal.phase2_success;
  m["nominal"] = path_metrics_json(eval);

  if (cfg.circle.ablation_s2r) {
    s2r::DatasetOptions d;
    d.n = cfg.s2r.samples;
    d.perturbation = cfg.s2r.perturbation;
    d.pid = cfg.pid;
    d.seed = cfg.seed + 11;
    const auto data = s2r::collect_s2r_dataset(d);
    s2r::S2RConfig sc = cfg.s2r.train;
    sc.seed = cfg.seed + 12;
    s2r::TrainReport rep;
    const s2r::S2RModel model = s2r::train_s2r(data.samples, sc, &rep);
    s2r::save_model(out_path(cfg, "s2r.bin").string(), model);

    control::ArmEnv reality_a(arm::calibrated_params(), sensor::SensorModel{}, cfg.s2r.perturbation, cfg.seed + 21);
    const auto without = eval_circle(cfg, nominal.policy, nullptr, reality_a);

    const CirclePolicy with = train_circle_policy(cfg, s2r_observer(model), cfg.seed);
    learn::save_checkpoint(out_path(cfg, "actor_s2r.bin").string(), with.policy.net());
    control::ArmEnv reality_b(arm::calibrated_params(), sensor::SensorModel{}, cfg.s2r.perturbation, cfg.seed + 21);
    const auto with_eval = eval_circle(cfg, with.policy, &model, reality_b);
    m["s2r_holdout_rmse_mm"] = rep.holdout_rmse;
    m["s2r_identity_rmse_mm"] = rep.identity_rmse;
    m["reality_without_s2r"] = path_metrics_json(without);
    m["reality_with_s2r"] = path_metrics_json(with_eval);
    m["s2r_error_ratio"] = without.rmse_translation / with_eval.rmse_translation;
  }
  return m;
}

json run_train_s2r(const ExperimentConfig& cfg) {
  s2r::DatasetOptions d;
  d.n = cfg.s2r.samples;
  d.perturbation = cfg.s2r.perturbation;
  d.pid = cfg.pid;
  d.seed = cfg.seed + 11;
  const auto data = s2r::collect_s2r_dataset(d);
  {
    std::ofstream out(out_path(cfg, "s2r_dataset.jsonl"));
    s2r::write_dataset(out, data.samples);
  }
  s2r::S2RConfig sc = cfg.s2r.train;
  sc.seed = cfg.seed + 12;
  s2r::TrainReport rep;
  const auto model = s2r::train_s2r(data.samples, sc, &rep);
  s2r::save_model(out_path(cfg, "s2r.bin").string(), model);
  return {{"samples", data.samples.size()},
          {"dropped", data.dropped},
          {"train_size", rep.train_size},
          {"holdout_size", rep.holdout_size},
          {"holdout_rmse_mm", rep.holdout_rmse},
          {"identity_rmse_mm", rep.identity_rmse},
          {"holdout_angle_rmse_deg", rep.holdout_angle_rmse},
          {"identity_angle_rmse_deg", rep.identity_angle_rmse},
          {"first_epoch_loss", rep.epoch_loss.front()},
          {"last_epoch_loss", rep.epoch_loss.back()}};
}

json run_record_demo(const ExperimentConfig& cfg) {
  if (cfg.record_demo.mode != "oracle")
    throw std::invalid_argument("record-demo: this entry point only runs oracle mode; use `serve` for teleop recording");
  std::vector<gail::DemoRecord> recs;
  try {
    recs = oracle_demos(cfg, cfg.record_demo.diameter);
  } catch (const gail::OracleCollision& e) {
    throw std::runtime_error(std::string("record-demo: ") + e.what());
  }
  const fs::path p = out_path(cfg, "demo.jsonl");
  gail::save_demo(p.string(), recs);
  const auto ds = gail::relabel_demos(gail::DemoFile{recs}.sequences(), cfg.rl,
                                      rl::ActionCodec::for_arm(sensor::SensorModel{}, arm::calibrated_params()));
  return {{"records", recs.size()}, {"relabeled", ds.records.size()}, {"passes", cfg.record_demo.passes},
          {"path", p.filename().string()}};
}

json run_pickplace(const ExperimentConfig& cfg) {
  const auto& pp = cfg.pickplace;
  const std::string demo_path = pp.demo.empty() ? out_path(cfg, "demo.jsonl").string() : pp.demo;
  if (!fs::exists(demo_path))
    throw IoError("no demonstrations at " + demo_path +
                             "; record them first with `ssilkc record-demo --out <dir>` (oracle) or `ssilkc serve`");
  const gail::DemoFile file = gail::load_demo(demo_path);
  rl::TrainingSetup base = make_setup(cfg);
  base.options.updates_per_step = pp.updates_per_step;
  const rl::ActionCodec codec = rl::ActionCodec::for_arm(base.sensor, base.arm);
  const gail::DemoDataset demos = gail::relabel_demos(file.sequences(), cfg.rl, codec);
  const auto goals = demo_goals(file.records);
  if (goals.empty()) throw IoError("demo file " + demo_path + " has no reached waypoints");
  const arm::PipeScene scene = scene_or(cfg, arm::cross_pipe_scene(pp.diameter, pp.cross_height));
  const QuotaSchedule schedule = cfg.buffer_schedule.empty() ? QuotaSchedule{} : load_schedule(cfg.buffer_schedule);

  auto train_curve = [&](rl::TQCAgent& agent, rl::ReplayBuffer& buffer, rl::TrainingLog& log,
                         const rl::RewardHooks& hooks, const std::vector<arm::Pose6D>& g, const arm::PipeScene& sc,
                         long offset, long steps, std::vector<std::pair<long, double>>& curve) {
    rl::TrainingSetup s = base;
    long done = 0;
    SceneEval last;
    while (done < steps) {
      const long chunk = std::min<long>(pp.eval_every, steps - done);
      s.options.total_steps = chunk;
      train_scheduled(s, g, agent, buffer, log, hooks, offset + done, schedule, cfg.seed);
      done += chunk;
      last = eval_in_scene(agent.policy(), g, sc, cfg);
      curve.emplace_back(offset + done, last.success_rate);
      progress("pickplace: step " + std::to_string(offset + done) + ", success " + std::to_string(last.success_rate));
    }
    return last;
  };

  json m;
  m["goals"] = goals.size();
  m["demo_records"] = demos.records.size();

  rl::TQCAgent gail_agent(base.tqc, codec, cfg.seed * 7 + 5);
  rl::ReplayBuffer gail_buffer(400000);
  rl::TrainingLog gail_log;
  gail::GailRewarder rewarder(cfg.gail, demos, cfg.seed + 31);
  std::vector<std::pair<long, double>> gail_curve;
  const SceneEval g = train_curve(gail_agent, gail_buffer, gail_log, rewarder.hooks(), goals, scene, 0, pp.steps, gail_curve);
  learn::save_checkpoint(out_path(cfg, "actor_gail.bin").string(), gail_agent.actor());
  learn::save_checkpoint(out_path(cfg, "discriminator.bin").string(), rewarder.discriminator().net());
  write_log(out_path(cfg, "train_log_gail.jsonl"), gail_log);
  m["gail"] = {{"success_rate", g.success_rate},
               {"reached", g.reached},
               {"collisions", g.collisions},
               {"successful_rollouts_collision_free", g.successful_rollouts_collision_free},
               {"curve", curve_json(gail_curve)},
               {"disc_updates", rewarder.history().size()}};

  if (pp.run_baseline) {
    rl::TQCAgent agent(base.tqc, codec, cfg.seed * 7 + 5);
    rl::ReplayBuffer buffer(400000);
    rl::TrainingLog log;
    std::vector<std::pair<long, double>> curve;
    const SceneEval b = train_curve(agent, buffer, log, {}, goals, scene, 0, pp.steps, curve);
    learn::save_checkpoint(out_path(cfg, "actor_baseline.bin").string(), agent.actor());
    write_log(out_path(cfg, "train_log_baseline.jsonl"), log);
    m["baseline"] = {{"success_rate", b.success_rate},
                     {"reached", b.reached},
                     {"collisions", b.collisions},
                     {"successful_rollouts_collision_free", b.successful_rollouts_collision_free},
                     {"curve", curve_json(curve)}};
  }

  if (pp.run_reuse) {
    const auto fresh = demo_goals(oracle_demos(cfg, pp.reuse_diameter));
    const arm::PipeScene small = arm::cross_pipe_scene(pp.reuse_diameter, pp.cross_height);
    rl::ReplayBuffer buffer(400000);
    std::vector<std::pair<long, double>> curve;
    const SceneEval r =
        train_curve(gail_agent, buffer, gail_log, rewarder.hooks(), fresh, small, pp.steps, pp.reuse_steps, curve);
    m["reuse"] = {{"diameter", pp.reuse_diameter},
                  {"success_rate", r.success_rate},
                  {"collisions", r.collisions},
                  {"ratio_to_first_scene", g.success_rate > 0 ? r.success_rate / g.success_rate : 0.0},
                  {"curve", curve_json(curve)}};
  }
  return m;
}

json run_eval_path(const ExperimentConfig& cfg) {
  if (cfg.actor.empty()) throw std::invalid_argument("eval-path: set `actor` to a policy checkpoint");
  const rl::TrainingSetup base = make_setup(cfg);
  const rl::Policy policy(learn::load_checkpoint(cfg.actor), rl::ActionCodec::for_arm(base.sensor, base.arm));
  std::optional<s2r::S2RModel> model;
  if (!cfg.s2r_model.empty()) model = s2r::load_model(cfg.s2r_model);
  control::ArmEnv env = cfg.eval_reality ? control::ArmEnv(arm::calibrated_params(), sensor::SensorModel{},
                                                           cfg.s2r.perturbation, cfg.seed + 21)
                                         : control::ArmEnv();
  const auto m = eval_circle(cfg, policy, model ? &*model : nullptr, env);
  write_text(out_path(cfg, "trajectory.csv"), m.log.to_csv());
  write_text(out_path(cfg, "summary.txt"), m.summary());
  return path_metrics_json(m);
}

json run_gp_ablation(const ExperimentConfig& cfg, const std::vector<double>& weights, int window_begin,
                     int window_end) {
  if (window_begin < 0 || window_end <= window_begin) throw std::invalid_argument("gp ablation: empty update window");
  const std::vector<gail::DemoRecord> recs = oracle_demos(cfg, cfg.pickplace.diameter);
  const rl::TrainingSetup base = make_setup(cfg);
  const rl::ActionCodec codec = rl::ActionCodec::for_arm(base.sensor, base.arm);
  const gail::DemoDataset demos = gail::relabel_demos(gail::DemoFile{recs}.sequences(), cfg.rl, codec);
  const auto goals = demo_goals(recs);
  rl::TrainingSetup setup = base;
  const int per_step = std::max(1, setup.options.updates_per_step);
  const long updates_needed = static_cast<long>(window_end) * cfg.gail.update_every;
  setup.options.total_steps = setup.options.learning_starts + (updates_needed + per_step - 1) / per_step;
  json runs = json::array();
  for (double w : weights) {
    gail::GailConfig g = cfg.gail;
    g.gp_weight = w;
    rl::TQCAgent agent(setup.tqc, codec, cfg.seed * 7 + 5);
    rl::ReplayBuffer buffer(400000);
    rl::TrainingLog log;
    gail::GailRewarder rewarder(g, demos, cfg.seed + 31);
    rl::train_multigoal(setup, goals, agent, buffer, log, rewarder.hooks());
    const auto& h = rewarder.history();
    if (h.size() < static_cast<std::size_t>(window_end))
      throw std::runtime_error("gp ablation: only " + std::to_string(h.size()) + " discriminator updates ran");
    double dev = 0.0, acc = 0.0;
    for (int k = window_begin; k < window_end; ++k) {
      dev += h[static_cast<std::size_t>(k)].mean_abs_deviation;
      acc += h[static_cast<std::size_t>(k)].accuracy;
    }
    const double n = window_end - window_begin;
    runs.push_back({{"gp_weight", w},
                    {"mean_abs_deviation", dev / n},
                    {"mean_accuracy", acc / n},
                    {"updates", h.size()}});
    progress("gp ablation: lambda " + std::to_string(w) + ", mean |D-0.5| " + std::to_string(dev / n));
  }
  return {{"window", {window_begin, window_end}}, {"runs", runs}};
}

json run_command(const std::string& name, const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out);
  write_text(out_path(cfg, "config.json"), config_to_json(cfg).dump(2) + "\n");
  json m;
  if (name == "workspace") {
    m = run_workspace(cfg);
  } else if (name == "train-circle") {
    m = run_train_circle(cfg);
  } else if (name == "train-s2r") {
    m = run_train_s2r(cfg);
  } else if (name == "record-demo") {
    m = run_record_demo(cfg);
  } else if (name == "pickplace") {
    m = run_pickplace(cfg);
  } else if (name == "eval-path") {
    m = run_eval_path(cfg);
  } else if (name == "gp-ablation") {
    m = run_gp_ablation(cfg);
  } else {
    throw std::invalid_argument("unknown command '" + name + "'");
  }
  json wrapped{{"command", name}, {"seed", cfg.seed}, {"metrics", m}};
  write_text(out_path(cfg, "metrics.json"), wrapped.dump(2) + "\n");
  return wrapped;
}

}  // namespace ssilkc::harness
