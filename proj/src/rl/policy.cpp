#include "rl/policy.hpp"

#include <algorithm>
#include <cmath>

namespace ssilkc::rl {

Policy::Policy(learn::MLP actor, ActionCodec codec) : actor_(std::move(actor)), codec_(codec) {}

ChamberVec Policy::act_normalized(const RLState& s, bool deterministic, std::mt19937_64& rng) const {
  const Eigen::VectorXd out = actor_.predict(state_features(s));
  ChamberVec u{};
  std::normal_distribution<double> n01;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double mean = out[static_cast<Eigen::Index>(i)];
    double pre = mean;
    if (!deterministic) {
      const double log_std = std::clamp(out[static_cast<Eigen::Index>(i + u.size())], kLogStdMin, kLogStdMax);
      pre += std::exp(log_std) * n01(rng);
    }
    u[i] = std::tanh(pre);
  }
  return u;
}

ChamberVec act(const Policy& policy, const RLState& s, bool deterministic, std::mt19937_64& rng) {
  return policy.codec().to_frequencies(policy.act_normalized(s, deterministic, rng));
}

}  // namespace ssilkc::rl
