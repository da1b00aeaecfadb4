#include "gail/discriminator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "learn/shapes.hpp"

namespace ssilkc::gail {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double d) { return std::clamp(d, kDiscClamp, 1.0 - kDiscClamp); }

}  // namespace

void GailConfig::validate() const {
  if (!(gp_weight >= 0)) throw std::invalid_argument("GailConfig: gradient penalty weight must be non-negative");
  if (!(learning_rate > 0)) throw std::invalid_argument("GailConfig: learning rate must be positive");
  if (batch < 1) throw std::invalid_argument("GailConfig: batch must be at least 1");
  if (hidden < 1) throw std::invalid_argument("GailConfig: hidden size must be at least 1");
  if (update_every < 1) throw std::invalid_argument("GailConfig: update_every must be at least 1");
}

Eigen::VectorXd disc_input(const rl::RLState& s, const ChamberVec& action_u, const Pose6D& goal) {
  Eigen::VectorXd x(kDiscInputDim);
  x.head(18) = rl::state_features(s);
  for (int i = 0; i < 9; ++i) x[18 + i] = action_u[static_cast<std::size_t>(i)];
  x.tail(6) = rl::pose_features(goal);
  return x;
}

Eigen::MatrixXd disc_inputs(const std::vector<const rl::Transition*>& batch) {
  Eigen::MatrixXd x(kDiscInputDim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i)
    x.col(static_cast<Eigen::Index>(i)) = disc_input(batch[i]->s, batch[i]->action_u, batch[i]->goal());
  return x;
}

Eigen::MatrixXd disc_inputs(const std::vector<const DemoTransition*>& batch) {
  Eigen::MatrixXd x(kDiscInputDim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i)
    x.col(static_cast<Eigen::Index>(i)) = disc_input(batch[i]->s, batch[i]->action_u, batch[i]->goal);
  return x;
}

Discriminator::Discriminator(const GailConfig& cfg, std::uint64_t seed) : adam_(cfg.learning_rate) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  net_ = learn::make_network(learn::discriminator_shape(cfg.hidden), rng);
}

double Discriminator::prob(const Eigen::VectorXd& x) const { return sigmoid(net_.predict(x)[0]); }

Eigen::VectorXd Discriminator::probs(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd z = net_.predict(x);
  Eigen::VectorXd out(z.cols());
  for (Eigen::Index i = 0; i < z.cols(); ++i) out[i] = sigmoid(z(0, i));
  return out;
}

double disc_reward_from_prob(double d) { return std::log(1.0 - clamp_prob(d)); }

double disc_reward(const Discriminator& disc, const rl::RLState& s, const ChamberVec& action_u, const Pose6D& goal) {
  return disc_reward_from_prob(disc.prob(disc_input(s, action_u, goal)));
}

Eigen::MatrixXd interpolate_pairs(const Eigen::MatrixXd& expert, const Eigen::MatrixXd& policy, std::mt19937_64& rng,
                                  std::vector<double>* mus) {
  if (expert.rows() != policy.rows() || expert.cols() != policy.cols())
    throw std::domain_error("interpolate_pairs: expert and policy batches differ in size");
  if (expert.rows() != kDiscInputDim) throw std::domain_error("interpolate_pairs: expected 33-row inputs");
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Eigen::MatrixXd out = policy;
  if (mus) mus->clear();
  for (Eigen::Index b = 0; b < policy.cols(); ++b) {
    const double mu = u01(rng);
    if (mus) mus->push_back(mu);
    out.col(b).head(kDiscPenalizedDim) =
        mu * expert.col(b).head(kDiscPenalizedDim) + (1.0 - mu) * policy.col(b).head(kDiscPenalizedDim);
  }
  return out;
}

double gradient_penalty(const Discriminator& disc, const Eigen::MatrixXd& x) {
  if (x.cols() == 0) throw std::domain_error("gradient_penalty: empty batch");
  const Eigen::MatrixXd g = disc.net().input_gradient(x, true);
  double total = 0.0;
  for (Eigen::Index b = 0; b < x.cols(); ++b) {
    const double n = g.col(b).head(kDiscPenalizedDim).norm();
    total += (n - 1.0) * (n - 1.0);
  }
  return total / static_cast<double>(x.cols());
}

DiscStats disc_step(Discriminator& disc, const Eigen::MatrixXd& expert, const Eigen::MatrixXd& policy,
                    double gp_weight, std::mt19937_64& rng) {
  if (expert.cols() == 0 || policy.cols() == 0) throw std::domain_error("disc_step: empty batch");
  const Eigen::Index np = policy.cols(), ne = expert.cols();
  Eigen::MatrixXd x(kDiscInputDim, np + ne);
  x << policy, expert;
  learn::MLP& net = disc.net();
  net.zero_grad();
  const Eigen::MatrixXd z = net.forward(x);
  Eigen::MatrixXd upstream(1, np + ne);
  DiscStats st;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < np + ne; ++i) {
    const double d = sigmoid(z(0, i));
    const double dc = clamp_prob(d);
    st.mean_abs_deviation += std::abs(d - 0.5);
    if (i < np) {
      st.policy_term -= std::log(dc);
      st.mean_d_policy += d;
      upstream(0, i) = (d - 1.0) / static_cast<double>(np);
      correct += d > 0.5 ? 1 : 0;
    } else {
      st.expert_term -= std::log(1.0 - dc);
      st.mean_d_expert += d;
      upstream(0, i) = d / static_cast<double>(ne);
      correct += d < 0.5 ? 1 : 0;
    }
  }
  net.backward(upstream);
  st.policy_term /= static_cast<double>(np);
  st.expert_term /= static_cast<double>(ne);
  st.mean_d_policy /= static_cast<double>(np);
  st.mean_d_expert /= static_cast<double>(ne);
  st.mean_abs_deviation /= static_cast<double>(np + ne);
  st.accuracy = static_cast<double>(correct) / static_cast<double>(np + ne);

  if (ne == np) {
    const Eigen::MatrixXd mixed = interpolate_pairs(expert, policy, rng);
    st.penalty = net.input_gradient_penalty(mixed, kDiscPenalizedDim, true, gp_weight);
  } else if (gp_weight > 0) {
    throw std::domain_error("disc_step: the gradient penalty needs equal batch sizes");
  }
  st.loss = st.policy_term + st.expert_term + gp_weight * st.penalty;
  learn::adam_step(net, disc.optimizer());
  net.clear_cache();
  return st;
}

DiscStats disc_update(Discriminator& disc, const DemoDataset& demo, rl::ReplayBuffer& buffer, const GailConfig& cfg,
                      std::mt19937_64& rng) {
  if (demo.records.empty()) throw std::invalid_argument("disc_update: the demonstration set is empty");
  if (buffer.empty()) throw std::invalid_argument("disc_update: the replay buffer is empty");
  const auto n = static_cast<std::size_t>(cfg.batch);
  const auto idx = buffer.sample_indices(n, rng);
  std::vector<const rl::Transition*> pol;
  pol.reserve(n);
  for (std::size_t i : idx) pol.push_back(&buffer.at(i));
  std::uniform_int_distribution<std::size_t> pick(0, demo.records.size() - 1);
  std::vector<const DemoTransition*> exp;
  exp.reserve(n);
  for (std::size_t k = 0; k < n; ++k) exp.push_back(&demo.records[pick(rng)]);

  const Eigen::MatrixXd xp = disc_inputs(pol);
  const DiscStats st = disc_step(disc, disc_inputs(exp), xp, cfg.gp_weight, rng);

  const Eigen::VectorXd d = disc.probs(xp);
  if (cfg.mode == RewardMode::Faithful) {
    std::vector<rl::Transition> rewarded;
    rewarded.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      rewarded.push_back(*pol[k]);
      rewarded.back().reward = disc_reward_from_prob(d[static_cast<Eigen::Index>(k)]);
    }
    buffer.clear();
    for (const auto& t : rewarded) buffer.add(t);
  } else {
    for (std::size_t k = 0; k < n; ++k) buffer.at(idx[k]).reward = disc_reward_from_prob(d[static_cast<Eigen::Index>(k)]);
  }
  return st;
}

GailRewarder::GailRewarder(const GailConfig& cfg, const DemoDataset& demo, std::uint64_t seed)
    : cfg_(cfg), demo_(&demo), disc_(cfg, seed), rng_(seed ^ 0x9e3779b97f4a7c15ULL) {
  if (demo.records.empty()) throw std::invalid_argument("GailRewarder: the demonstration set is empty");
}

rl::RewardHooks GailRewarder::hooks() {
  rl::RewardHooks h;
  h.reward = [this](const rl::Transition& t) { return disc_reward(disc_, t.s, t.action_u, t.goal()); };
  if (cfg_.mode == RewardMode::RecomputeOnSample) {
    h.batch_rewards = [this](std::vector<rl::Transition>& batch) {
      std::vector<const rl::Transition*> ptrs;
      ptrs.reserve(batch.size());
      for (const auto& t : batch) ptrs.push_back(&t);
      const Eigen::VectorXd d = disc_.probs(disc_inputs(ptrs));
      for (std::size_t k = 0; k < batch.size(); ++k)
        batch[k].reward = disc_reward_from_prob(d[static_cast<Eigen::Index>(k)]);
    };
  }
  h.after_update = [this](long, rl::ReplayBuffer& buffer) {
    if (++rl_updates_ % cfg_.update_every != 0) return;
    history_.push_back(disc_update(disc_, *demo_, buffer, cfg_, rng_));
  };
  return h;
}

}  // namespace ssilkc::gail
