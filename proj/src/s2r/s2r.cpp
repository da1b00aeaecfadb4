#include "s2r/s2r.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "common/errors.hpp"
#include "json.hpp"
#include "learn/adam.hpp"
#include "learn/checkpoint.hpp"
#include "learn/shapes.hpp"

namespace ssilkc::s2r {

namespace {

constexpr double kResidualScale = 5.0;  // mm or deg per unit network output
constexpr char kDatasetFormat[] = "ssilkc-s2r-dataset";
constexpr int kDatasetVersion = 1;

Eigen::VectorXd features(const Pose6D& p, const ChamberVec& l) {
  Eigen::VectorXd x(15);
  x[0] = p.x / 250.0;
  x[1] = p.y / 250.0;
  x[2] = (p.z - 450.0) / 250.0;
  x[3] = p.yaw / 180.0;
  x[4] = p.pitch / 180.0;
  x[5] = p.roll / 180.0;
  for (std::size_t i = 0; i < 9; ++i) x[6 + static_cast<Eigen::Index>(i)] = (l[i] - 170.0) / 65.0;
  return x;
}

Eigen::VectorXd residual_target(const S2RSample& s) {
  const auto a = s.real_pose.to_array();
  const auto b = s.pose.to_array();
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    const double d = i < 3 ? a[i] - b[i] : arm::wrap_degrees(a[i] - b[i]);
    y[i] = d / kResidualScale;
  }
  return y;
}

nlohmann::json pose_json(const Pose6D& p) { return p.to_array(); }

Pose6D pose_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 6) throw IoError("s2r dataset: pose needs 6 values");
  return Pose6D::from_array(v);
}

}  // namespace

void S2RConfig::validate() const {
  if (!(learning_rate > 0)) throw std::invalid_argument("S2RConfig: learning rate must be positive");
  if (batch < 1) throw std::invalid_argument("S2RConfig: batch must be at least 1");
  if (epochs < 1) throw std::invalid_argument("S2RConfig: epochs must be at least 1");
  if (hidden < 1) throw std::invalid_argument("S2RConfig: hidden size must be at least 1");
  if (!(holdout_fraction > 0 && holdout_fraction < 1))
    throw std::invalid_argument("S2RConfig: holdout fraction must lie in (0, 1)");
}

Dataset collect_s2r_dataset(const DatasetOptions& opt) {
  if (opt.n < 100) throw std::invalid_argument("collect_s2r_dataset: need at least 100 samples");
  if (!(opt.spring_min < opt.spring_max)) throw std::invalid_argument("collect_s2r_dataset: empty setpoint box");
  opt.pid.validate();
  control::ArmEnv nominal(opt.arm);
  control::ArmEnv reality(opt.arm, sensor::SensorModel{}, opt.perturbation, opt.seed ^ 0x5eedULL);
  const auto [lo, hi] = nominal.spring_bounds();
  std::uniform_real_distribution<double> u(std::max(lo, opt.spring_min), std::min(hi, opt.spring_max));
  std::mt19937_64 rng(opt.seed);
  Dataset out;
  out.samples.reserve(opt.n);
  for (std::size_t k = 0; k < opt.n; ++k) {
    ChamberVec ref{};
    for (double& v : ref) v = u(rng);
    nominal.reset_straight();
    reality.reset_straight();
    const auto a = control::pid_track(nominal, ref, opt.pid);
    const auto b = control::pid_track(reality, ref, opt.pid);
    if (!a.settled || !b.settled) {
      ++out.dropped;
      continue;
    }
    out.samples.push_back({nominal.model_pose(), nominal.spring_lengths(), reality.true_pose()});
  }
  return out;
}

S2RModel identity_model(int hidden) {
  S2RModel m;
  m.net = learn::MLP::zeros({15, hidden, hidden, 6}, learn::Activation::Tanh, learn::Activation::Identity);
  return m;
}

Pose6D apply_s2r(const S2RModel& model, const Pose6D& pose, const ChamberVec& spring_lengths) {
  const Eigen::VectorXd y = model.net.predict(features(pose, spring_lengths));
  auto v = pose.to_array();
  for (int i = 0; i < 6; ++i) {
    v[i] += kResidualScale * y[i];
    if (i >= 3) v[i] = arm::wrap_degrees(v[i]);
  }
  return Pose6D::from_array(v);
}

std::pair<double, double> evaluate_rmse(const S2RModel& model, const std::vector<S2RSample>& samples) {
  if (samples.empty()) return {0.0, 0.0};
  double se = 0.0, sa = 0.0;
  for (const auto& s : samples) {
    const Pose6D p = apply_s2r(model, s.pose, s.spring_lengths);
    se += std::pow(p.translation_distance(s.real_pose), 2);
    const auto a = p.to_array(), b = s.real_pose.to_array();
    for (int i = 3; i < 6; ++i) sa += std::pow(arm::wrap_degrees(a[i] - b[i]), 2) / 3.0;
  }
  const double n = static_cast<double>(samples.size());
  return {std::sqrt(se / n), std::sqrt(sa / n)};
}

S2RModel train_s2r(const std::vector<S2RSample>& samples, const S2RConfig& cfg, TrainReport* report) {
  cfg.validate();
  if (samples.size() < 2 * static_cast<std::size_t>(cfg.batch))
    throw std::invalid_argument("train_s2r: need at least two batches of samples");
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_hold = static_cast<std::size_t>(std::round(cfg.holdout_fraction * samples.size()));
  const std::size_t n_train = samples.size() - n_hold;

  Eigen::MatrixXd x(15, static_cast<Eigen::Index>(n_train)), y(6, static_cast<Eigen::Index>(n_train));
  for (std::size_t i = 0; i < n_train; ++i) {
    const auto& s = samples[order[i]];
    x.col(static_cast<Eigen::Index>(i)) = features(s.pose, s.spring_lengths);
    y.col(static_cast<Eigen::Index>(i)) = residual_target(s);
  }

  S2RModel model;
  model.net = learn::make_network(learn::s2r_shape(cfg.hidden), rng);
  learn::AdamState adam(cfg.learning_rate);
  std::vector<Eigen::Index> idx(n_train);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> epoch_loss;
  for (int e = 0; e < cfg.epochs; ++e) {
    std::shuffle(idx.begin(), idx.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < n_train; start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch), n_train - start);
      Eigen::MatrixXd xb(15, static_cast<Eigen::Index>(m)), yb(6, static_cast<Eigen::Index>(m));
      for (std::size_t j = 0; j < m; ++j) {
        xb.col(static_cast<Eigen::Index>(j)) = x.col(idx[start + j]);
        yb.col(static_cast<Eigen::Index>(j)) = y.col(idx[start + j]);
      }
      model.net.zero_grad();
      const Eigen::MatrixXd diff = model.net.forward(xb) - yb;
      const double denom = static_cast<double>(m) * 6.0;
      total += diff.squaredNorm() / denom * static_cast<double>(m);
      model.net.backward(2.0 * diff / denom);
      learn::adam_step(model.net, adam);
    }
    epoch_loss.push_back(total / static_cast<double>(n_train));
  }
  model.net.clear_cache();

  if (report) {
    std::vector<S2RSample> hold;
    for (std::size_t i = n_train; i < samples.size(); ++i) hold.push_back(samples[order[i]]);
    report->train_size = n_train;
    report->holdout_size = hold.size();
    std::tie(report->holdout_rmse, report->holdout_angle_rmse) = evaluate_rmse(model, hold);
    std::tie(report->identity_rmse, report->identity_angle_rmse) = evaluate_rmse(identity_model(cfg.hidden), hold);
    report->epoch_loss = std::move(epoch_loss);
  }
  return model;
}

void write_dataset(std::ostream& out, const std::vector<S2RSample>& samples) {
  out << nlohmann::json{{"format", kDatasetFormat}, {"version", kDatasetVersion}}.dump() << '\n';
  for (const auto& s : samples) {
    nlohmann::json j;
    j["P"] = pose_json(s.pose);
    j["L_spring"] = s.spring_lengths;
    j["P_real"] = pose_json(s.real_pose);
    out << j.dump() << '\n';
  }
}

std::vector<S2RSample> read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("s2r dataset: missing header");
  const auto header = nlohmann::json::parse(line);
  if (header.value("format", "") != kDatasetFormat || header.value("version", 0) != kDatasetVersion)
    throw IoError("s2r dataset: unsupported header " + line);
  std::vector<S2RSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    S2RSample s;
    s.pose = pose_from_json(j.at("P"));
    const auto l = j.at("L_spring").get<std::vector<double>>();
    if (l.size() != 9) throw IoError("s2r dataset: L_spring needs 9 values");
    std::copy(l.begin(), l.end(), s.spring_lengths.begin());
    s.real_pose = pose_from_json(j.at("P_real"));
    out.push_back(s);
  }
  return out;
}

void save_model(const std::string& path, const S2RModel& model) { learn::save_checkpoint(path, model.net); }

S2RModel load_model(const std::string& path) {
  S2RModel m;
  m.net = learn::load_checkpoint(path);
  if (m.net.input_size() != 15 || m.net.output_size() != 6)
    throw IoError("s2r checkpoint has the wrong shape: " + path);
  return m;
}

}  // namespace ssilkc::s2r
