#include "rl/tqc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "learn/shapes.hpp"

namespace ssilkc::rl {

namespace {

constexpr double kSquashEps = 1e-6;

}  // namespace

void TQCConfig::validate() const {
  if (n_critics <= 0 || quantiles_per_critic <= 0) throw std::invalid_argument("tqc: critic counts must be positive");
  if (dropped_top_quantiles < 0 || dropped_top_quantiles >= pooled_atoms())
    throw std::invalid_argument("tqc.dropped_top_quantiles must be below n_critics * quantiles_per_critic");
  if (batch_size < 2) throw std::invalid_argument("tqc.batch_size must be at least 2");
  if (!(tau > 0 && tau <= 1)) throw std::invalid_argument("tqc.tau must lie in (0, 1]");
  if (!(gamma >= 0 && gamma < 1)) throw std::invalid_argument("tqc.gamma must lie in [0, 1)");
  if (!(actor_lr > 0 && critic_lr > 0 && alpha_lr >= 0)) throw std::invalid_argument("tqc: learning rates must be positive");
  if (!(initial_alpha > 0)) throw std::invalid_argument("tqc.initial_alpha must be positive");
  if (hidden <= 0) throw std::invalid_argument("tqc.hidden must be positive");
}

TQCBatch make_batch(const std::vector<const Transition*>& ts) {
  const auto n = static_cast<Eigen::Index>(ts.size());
  TQCBatch b;
  b.s.resize(learn::kStateDim, n);
  b.u.resize(learn::kActionDim, n);
  b.s_next.resize(learn::kStateDim, n);
  b.reward.resize(n);
  b.done.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = *ts[static_cast<std::size_t>(j)];
    b.s.col(j) = state_features(t.s);
    b.s_next.col(j) = state_features(t.s_next);
    for (int i = 0; i < learn::kActionDim; ++i) b.u(i, j) = t.action_u[static_cast<std::size_t>(i)];
    b.reward[j] = t.reward;
    b.done[j] = t.done ? 1.0 : 0.0;
  }
  return b;
}

Eigen::MatrixXd truncated_targets(const Eigen::MatrixXd& pooled, const Eigen::VectorXd& reward,
                                  const Eigen::VectorXd& done, const Eigen::VectorXd& entropy_term,
                                  double gamma, int dropped) {
  const Eigen::Index atoms = pooled.rows();
  const Eigen::Index kept = atoms - dropped;
  if (dropped < 0 || kept <= 0) throw std::domain_error("truncated_targets: bad drop count");
  Eigen::MatrixXd out(kept, pooled.cols());
  std::vector<double> col(static_cast<std::size_t>(atoms));
  for (Eigen::Index b = 0; b < pooled.cols(); ++b) {
    for (Eigen::Index a = 0; a < atoms; ++a) col[static_cast<std::size_t>(a)] = pooled(a, b);
    std::sort(col.begin(), col.end());
    const double discount = gamma * (1.0 - done[b]);
    for (Eigen::Index a = 0; a < kept; ++a)
      out(a, b) = reward[b] + discount * (col[static_cast<std::size_t>(a)] - entropy_term[b]);
  }
  return out;
}

double quantile_huber_loss(const Eigen::MatrixXd& current, const Eigen::MatrixXd& targets, Eigen::MatrixXd* grad) {
  const Eigen::Index nq = current.rows();
  const Eigen::Index na = targets.rows();
  const Eigen::Index nb = current.cols();
  if (targets.cols() != nb || nb == 0) throw std::domain_error("quantile_huber_loss: batch mismatch");
  const double norm = 1.0 / static_cast<double>(na * nb);
  double loss = 0.0;
  if (grad) grad->setZero(nq, nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    for (Eigen::Index j = 0; j < nq; ++j) {
      const double tau = (static_cast<double>(j) + 0.5) / static_cast<double>(nq);
      const double z = current(j, b);
      double g = 0.0;
      for (Eigen::Index k = 0; k < na; ++k) {
        const double delta = targets(k, b) - z;
        const double ad = std::abs(delta);
        const double huber = ad <= 1.0 ? 0.5 * delta * delta : ad - 0.5;
        const double weight = std::abs(tau - (delta < 0.0 ? 1.0 : 0.0));
        loss += weight * huber;
        g -= weight * std::clamp(delta, -1.0, 1.0);
      }
      if (grad) (*grad)(j, b) = g * norm;
    }
  }
  return loss * norm;
}

TQCAgent::TQCAgent(const TQCConfig& cfg, ActionCodec codec, std::uint64_t seed)
    : cfg_(cfg),
      codec_(codec),
      rng_(seed),
      actor_opt_(cfg.actor_lr),
      alpha_opt_(cfg.alpha_lr) {
  cfg_.validate();
  actor_ = learn::make_network(learn::actor_shape(cfg_.hidden), rng_);
  for (int c = 0; c < cfg_.n_critics; ++c) {
    critics_.push_back(learn::make_network(learn::critic_shape(cfg_.hidden, cfg_.quantiles_per_critic), rng_));
    critic_opts_.emplace_back(cfg_.critic_lr);
  }
  target_critics_ = critics_;
  log_alpha_ = std::log(cfg_.initial_alpha);
}

double TQCAgent::alpha() const { return std::exp(log_alpha_); }

TQCAgent::ActionSample TQCAgent::sample_actions(const Eigen::MatrixXd& out) {
  const Eigen::Index a = learn::kActionDim;
  const Eigen::Index n = out.cols();
  ActionSample s;
  s.eps.resize(a, n);
  std::normal_distribution<double> n01;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < a; ++i) s.eps(i, j) = n01(rng_);
  const Eigen::MatrixXd raw_log_std = out.bottomRows(a);
  s.std_clamped = (raw_log_std.array() < kLogStdMin) || (raw_log_std.array() > kLogStdMax);
  s.log_std = raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  s.pre = out.topRows(a) + (s.log_std.array().exp() * s.eps.array()).matrix();
  s.u = s.pre.array().tanh().matrix();
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  s.logp.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double lp = 0.0;
    for (Eigen::Index i = 0; i < a; ++i) {
      const double u = s.u(i, j);
      lp += -0.5 * s.eps(i, j) * s.eps(i, j) - s.log_std(i, j) - half_log_2pi - std::log(1.0 - u * u + kSquashEps);
    }
    s.logp[j] = lp;
  }
  return s;
}

Eigen::MatrixXd TQCAgent::pooled_quantiles(std::vector<learn::MLP>& nets, const Eigen::MatrixXd& input, bool cache) {
  const Eigen::Index q = cfg_.quantiles_per_critic;
  Eigen::MatrixXd pooled(q * static_cast<Eigen::Index>(nets.size()), input.cols());
  for (std::size_t c = 0; c < nets.size(); ++c)
    pooled.middleRows(static_cast<Eigen::Index>(c) * q, q) = cache ? nets[c].forward(input) : nets[c].predict(input);
  return pooled;
}

TQCLosses TQCAgent::update(const TQCBatch& batch) {
  const Eigen::Index n = batch.size();
  if (n == 0) throw std::domain_error("tqc_update: empty batch");
  const Eigen::Index sd = learn::kStateDim;
  const Eigen::Index ad = learn::kActionDim;
  const Eigen::Index q = cfg_.quantiles_per_critic;
  const double alpha = std::exp(log_alpha_);
  TQCLosses losses;
  losses.entropy_coef = alpha;

  // Critic targets from the target critics at a fresh next action.
  Eigen::MatrixXd targets;
  {
    const ActionSample next = sample_actions(actor_.predict(batch.s_next));
    Eigen::MatrixXd input(sd + ad, n);
    input.topRows(sd) = batch.s_next;
    input.bottomRows(ad) = next.u;
    const Eigen::MatrixXd pooled = pooled_quantiles(target_critics_, input, false);
    targets = truncated_targets(pooled, batch.reward * cfg_.reward_scale, batch.done, alpha * next.logp,
                                cfg_.gamma, cfg_.dropped_top_quantiles);
  }

  // Critic regression.
  {
    Eigen::MatrixXd input(sd + ad, n);
    input.topRows(sd) = batch.s;
    input.bottomRows(ad) = batch.u;
    double total = 0.0;
    for (std::size_t c = 0; c < critics_.size(); ++c) {
      auto& critic = critics_[c];
      critic.zero_grad();
      const Eigen::MatrixXd z = critic.forward(input);
      Eigen::MatrixXd grad;
      total += quantile_huber_loss(z, targets, &grad);
      critic.backward(grad);
      learn::adam_step(critic, critic_opts_[c]);
    }
    losses.critic_loss = total / static_cast<double>(critics_.size());
  }

  // Actor: maximize the mean of the truncated pooled atoms plus entropy.
  {
    actor_.zero_grad();
    const Eigen::MatrixXd out = actor_.forward(batch.s);
    const ActionSample cur = sample_actions(out);
    Eigen::MatrixXd input(sd + ad, n);
    input.topRows(sd) = batch.s;
    input.bottomRows(ad) = cur.u;
    const Eigen::MatrixXd pooled = pooled_quantiles(critics_, input, true);
    const Eigen::Index kept = cfg_.kept_atoms();
    Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(pooled.rows(), n);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(pooled.rows()));
    double q_mean = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) {
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<Eigen::Index>(k);
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index x, Eigen::Index y) { return pooled(x, b) < pooled(y, b); });
      double qb = 0.0;
      for (Eigen::Index k = 0; k < kept; ++k) {
        qb += pooled(order[static_cast<std::size_t>(k)], b);
        dz(order[static_cast<std::size_t>(k)], b) = -1.0 / (static_cast<double>(kept) * static_cast<double>(n));
      }
      q_mean += qb / static_cast<double>(kept);
    }
    q_mean /= static_cast<double>(n);
    Eigen::MatrixXd du = Eigen::MatrixXd::Zero(ad, n);
    for (std::size_t c = 0; c < critics_.size(); ++c) {
      const Eigen::MatrixXd dx = critics_[c].backward(dz.middleRows(static_cast<Eigen::Index>(c) * q, q));
      du += dx.bottomRows(ad);
      critics_[c].zero_grad();
    }
    losses.actor_loss = alpha * cur.logp.mean() - q_mean;

    const double inv_n = 1.0 / static_cast<double>(n);
    Eigen::MatrixXd d_out(2 * ad, n);
    for (Eigen::Index b = 0; b < n; ++b) {
      for (Eigen::Index i = 0; i < ad; ++i) {
        const double u = cur.u(i, b);
        const double one_minus = 1.0 - u * u;
        const double dlogp_dpre = 2.0 * u * one_minus / (one_minus + kSquashEps);
        const double d_pre = du(i, b) * one_minus + alpha * inv_n * dlogp_dpre;
        const double sigma = std::exp(cur.log_std(i, b));
        d_out(i, b) = d_pre;
        d_out(ad + i, b) = cur.std_clamped(i, b) ? 0.0 : d_pre * sigma * cur.eps(i, b) - alpha * inv_n;
      }
    }
    actor_.backward(d_out);
    learn::adam_step(actor_, actor_opt_);

    // Entropy temperature.
    if (cfg_.alpha_lr > 0) {
      log_alpha_grad_ = -(cur.logp.array() + cfg_.target_entropy).mean();
      learn::ParamBlock block{&log_alpha_, &log_alpha_grad_, 1};
      learn::adam_step(std::span<const learn::ParamBlock>(&block, 1), alpha_opt_);
    }
  }

  for (std::size_t c = 0; c < critics_.size(); ++c) target_critics_[c].polyak_update(critics_[c], cfg_.tau);
  ++updates_;
  return losses;
}

}  // namespace ssilkc::rl
