#pragma once

#include <random>

#include "learn/mlp.hpp"
#include "rl/rl_types.hpp"

namespace ssilkc::rl {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Squashed-Gaussian actor over normalized actions, decoded into the
/// sensor-frequency band by an ActionCodec.
class Policy {
 public:
  Policy() = default;
  Policy(learn::MLP actor, ActionCodec codec);

  [[nodiscard]] const learn::MLP& net() const { return actor_; }
  learn::MLP& net() { return actor_; }
  [[nodiscard]] const ActionCodec& codec() const { return codec_; }

  /// Normalized action in (-1, 1)^9. Deterministic returns tanh(mean).
  [[nodiscard]] ChamberVec act_normalized(const RLState& s, bool deterministic, std::mt19937_64& rng) const;

 private:
  learn::MLP actor_;
  ActionCodec codec_;
};

/// Sensor-frequency action (Hz) for state s.
ChamberVec act(const Policy& policy, const RLState& s, bool deterministic, std::mt19937_64& rng);

}  // namespace ssilkc::rl
