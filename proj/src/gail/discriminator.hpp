#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "gail/demo.hpp"
#include "learn/adam.hpp"
#include "learn/mlp.hpp"
#include "rl/replay_buffer.hpp"
#include "rl/trainer.hpp"

namespace ssilkc::gail {

inline constexpr int kDiscInputDim = 33;     // state 18 + action 9 + goal 6
inline constexpr int kDiscPenalizedDim = 27;  // state and action rows
inline constexpr double kDiscClamp = 1e-6;

enum class RewardMode { Faithful, RecomputeOnSample };

struct GailConfig {
  double gp_weight = 20.0;  // lambda
  double learning_rate = 3e-4;
  int batch = 128;
  int hidden = 128;
  int update_every = 1;  // RL updates per discriminator update
  RewardMode mode = RewardMode::Faithful;

  void validate() const;
};

/// Network input column for (s, a, g); a is the normalized action.
Eigen::VectorXd disc_input(const rl::RLState& s, const ChamberVec& action_u, const Pose6D& goal);
Eigen::MatrixXd disc_inputs(const std::vector<const rl::Transition*>& batch);
Eigen::MatrixXd disc_inputs(const std::vector<const DemoTransition*>& batch);

/// D(s, a, g) = sigmoid(net(x)); pushed toward 1 on policy samples and
/// toward 0 on expert samples.
class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(const GailConfig& cfg, std::uint64_t seed);

  [[nodiscard]] double prob(const Eigen::VectorXd& x) const;
  [[nodiscard]] Eigen::VectorXd probs(const Eigen::MatrixXd& x) const;
  [[nodiscard]] const learn::MLP& net() const { return net_; }
  learn::MLP& net() { return net_; }
  learn::AdamState& optimizer() { return adam_; }

 private:
  learn::MLP net_;
  learn::AdamState adam_;
};

/// r = log(1 - D), with D clamped to [1e-6, 1 - 1e-6].
double disc_reward_from_prob(double d);
double disc_reward(const Discriminator& disc, const rl::RLState& s, const ChamberVec& action_u, const Pose6D& goal);

/// Per column: rows [0, 27) mixed as mu * expert + (1 - mu) * policy with a
/// fresh mu ~ U(0, 1); goal rows copied from the policy column.
Eigen::MatrixXd interpolate_pairs(const Eigen::MatrixXd& expert, const Eigen::MatrixXd& policy, std::mt19937_64& rng,
                                  std::vector<double>* mus = nullptr);

/// mean_b (||d D / d (s, a)||_2 - 1)^2 at the columns of x.
double gradient_penalty(const Discriminator& disc, const Eigen::MatrixXd& x);

struct DiscStats {
  double loss = 0;         // full objective including the weighted penalty
  double policy_term = 0;  // -mean log D(policy)
  double expert_term = 0;  // -mean log(1 - D(expert))
  double penalty = 0;      // unweighted
  double mean_d_policy = 0;
  double mean_d_expert = 0;
  double mean_abs_deviation = 0;  // mean |D - 0.5| over both batches
  double accuracy = 0;            // fraction classified on the right side of 0.5
};

/// One optimizer step on expert and policy input batches.
DiscStats disc_step(Discriminator& disc, const Eigen::MatrixXd& expert, const Eigen::MatrixXd& policy,
                    double gp_weight, std::mt19937_64& rng);

/// One round of the discriminator update procedure: sample |B| transitions
/// from the replay buffer and the demos, take one step, re-reward the sampled
/// transitions, and (faithful mode) reset the buffer to the re-rewarded batch.
DiscStats disc_update(Discriminator& disc, const DemoDataset& demo, rl::ReplayBuffer& buffer, const GailConfig& cfg,
                      std::mt19937_64& rng);

/// Wires a discriminator into train_multigoal.
class GailRewarder {
 public:
  GailRewarder(const GailConfig& cfg, const DemoDataset& demo, std::uint64_t seed);

  [[nodiscard]] rl::RewardHooks hooks();
  [[nodiscard]] const std::vector<DiscStats>& history() const { return history_; }
  Discriminator& discriminator() { return disc_; }

 private:
  GailConfig cfg_;
  const DemoDataset* demo_;
  Discriminator disc_;
  std::mt19937_64 rng_;
  long rl_updates_ = 0;
  std::vector<DiscStats> history_;
};

}  // namespace ssilkc::gail
