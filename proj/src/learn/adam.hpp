#pragma once

#include <span>
#include <vector>

#include "learn/mlp.hpp"

namespace ssilkc::learn {

/// Moment buffers for one group of parameter blocks.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  explicit AdamState(double lr = 1e-3) : learning_rate(lr) {}
};

/// One bias-corrected Adam update. Moment buffers are sized on first use and
/// must keep matching shapes afterwards.
void adam_step(std::span<const ParamBlock> params, AdamState& state);

/// Convenience: update an MLP from its own gradient buffers.
void adam_step(MLP& net, AdamState& state);

}  // namespace ssilkc::learn
