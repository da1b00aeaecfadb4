#pragma once

#include <string>
#include <vector>

#include "learn/mlp.hpp"

namespace ssilkc::learn {

struct NetworkShape {
  std::string name;
  std::vector<int> sizes;
  Activation hidden;
  Activation output;
};

inline constexpr int kStateDim = 18;
inline constexpr int kActionDim = 9;
inline constexpr int kGoalDim = 6;
inline constexpr int kQuantilesPerCritic = 25;

inline NetworkShape actor_shape(int hidden = 128) {
  // Mean and log standard deviation per action component.
  return {"actor", {kStateDim, hidden, hidden, 2 * kActionDim}, Activation::Relu, Activation::Identity};
}
inline NetworkShape critic_shape(int hidden = 128, int quantiles = kQuantilesPerCritic) {
  return {"critic", {kStateDim + kActionDim, hidden, hidden, quantiles}, Activation::Relu, Activation::Identity};
}
inline NetworkShape discriminator_shape(int hidden = 128) {
  return {"discriminator",
          {kStateDim + kActionDim + kGoalDim, hidden, hidden, 1},
          Activation::Tanh,
          Activation::Identity};
}
inline NetworkShape s2r_shape(int hidden = 64) {
  return {"s2r", {15, hidden, hidden, 6}, Activation::Tanh, Activation::Identity};
}

/// Every network shape the library builds with default sizes.
inline std::vector<NetworkShape> network_catalog() {
  return {actor_shape(), critic_shape(), discriminator_shape(), s2r_shape()};
}

inline MLP make_network(const NetworkShape& shape, std::mt19937_64& rng) {
  return MLP(shape.sizes, shape.hidden, shape.output, rng);
}

}  // namespace ssilkc::learn
