#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "learn/adam.hpp"
#include "learn/mlp.hpp"
#include "rl/policy.hpp"
#include "rl/replay_buffer.hpp"

namespace ssilkc::rl {

struct TQCConfig {
  int n_critics = 2;
  int quantiles_per_critic = 25;
  int dropped_top_quantiles = 4;  // total, over the pooled atoms
  double target_entropy = -9.0;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double alpha_lr = 3e-4;
  double initial_alpha = 1.0;
  int batch_size = 256;
  double tau = 0.005;
  double gamma = 0.98;
  int hidden = 128;
  double reward_scale = 1.0;

  void validate() const;
  [[nodiscard]] int pooled_atoms() const { return n_critics * quantiles_per_critic; }
  [[nodiscard]] int kept_atoms() const { return pooled_atoms() - dropped_top_quantiles; }
};

/// Column-major training batch; features from state_features().
struct TQCBatch {
  Eigen::MatrixXd s;       // 18 x B
  Eigen::MatrixXd u;       // 9 x B, normalized actions
  Eigen::MatrixXd s_next;  // 18 x B
  Eigen::VectorXd reward;  // B
  Eigen::VectorXd done;    // B, 1 for terminal

  [[nodiscard]] Eigen::Index size() const { return s.cols(); }
};

TQCBatch make_batch(const std::vector<const Transition*>& transitions);

struct TQCLosses {
  double critic_loss = 0;
  double actor_loss = 0;
  double entropy_coef = 0;
};

/// Target atoms per sample: the pooled next-state atoms sorted ascending with
/// the top `dropped` removed, then r + gamma * (1 - done) * (atom - entropy_term).
/// `pooled` is atoms x B; the result is kept x B, sorted within each column.
Eigen::MatrixXd truncated_targets(const Eigen::MatrixXd& pooled, const Eigen::VectorXd& reward,
                                  const Eigen::VectorXd& done, const Eigen::VectorXd& entropy_term,
                                  double gamma, int dropped);

/// Quantile-Huber loss of `current` (quantiles x B) against `targets`
/// (atoms x B): summed over quantiles, averaged over atoms and batch.
/// Writes dLoss/dcurrent into `grad` when non-null.
double quantile_huber_loss(const Eigen::MatrixXd& current, const Eigen::MatrixXd& targets,
                           Eigen::MatrixXd* grad);

class TQCAgent {
 public:
  TQCAgent(const TQCConfig& cfg, ActionCodec codec, std::uint64_t seed);

  TQCLosses update(const TQCBatch& batch);

  [[nodiscard]] Policy policy() const { return Policy(actor_, codec_); }
  [[nodiscard]] const learn::MLP& actor() const { return actor_; }
  [[nodiscard]] const std::vector<learn::MLP>& critics() const { return critics_; }
  [[nodiscard]] double alpha() const;
  [[nodiscard]] const TQCConfig& config() const { return cfg_; }
  [[nodiscard]] long updates() const { return updates_; }

 private:
  struct ActionSample {
    Eigen::MatrixXd u, pre, log_std, eps;
    Eigen::VectorXd logp;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> std_clamped;
  };
  ActionSample sample_actions(const Eigen::MatrixXd& actor_out);
  Eigen::MatrixXd pooled_quantiles(std::vector<learn::MLP>& nets, const Eigen::MatrixXd& input, bool cache);

  TQCConfig cfg_;
  ActionCodec codec_;
  std::mt19937_64 rng_;
  learn::MLP actor_;
  std::vector<learn::MLP> critics_;
  std::vector<learn::MLP> target_critics_;
  learn::AdamState actor_opt_;
  std::vector<learn::AdamState> critic_opts_;
  learn::AdamState alpha_opt_;
  double log_alpha_ = 0;
  double log_alpha_grad_ = 0;
  long updates_ = 0;
};

}  // namespace ssilkc::rl
