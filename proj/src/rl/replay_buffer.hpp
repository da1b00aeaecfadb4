#pragma once

#include <cstddef>
#include <map>
#include <random>
#include <vector>

#include "rl/rl_types.hpp"

namespace ssilkc::rl {

/// Ring buffer of transitions with per-goal bookkeeping. Single writer;
/// readers sample against the contents at call time.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 200000);

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t capacity() const { return data_.size(); }
  [[nodiscard]] bool empty() const { return size_ == 0; }

  void add(const Transition& t);
  void clear();

  /// Uniform sample with replacement.
  [[nodiscard]] std::vector<const Transition*> sample(std::size_t n, std::mt19937_64& rng) const;
  [[nodiscard]] std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const;

  [[nodiscard]] const Transition& at(std::size_t i) const;
  Transition& at(std::size_t i);

  /// Stored transition count per goal id.
  [[nodiscard]] std::map<int, std::size_t> goal_counts() const;
  [[nodiscard]] std::size_t reward_bearing_count(double goal_reward) const;

  /// Keeps a random subset of `keep` transitions whose per-goal shares follow
  /// `quotas` (goal id -> fraction, fractions summing to at most 1). Goals
  /// without enough transitions contribute what they have.
  void retain(std::size_t keep, const std::map<int, double>& quotas, std::mt19937_64& rng);
  /// Largest subset whose per-goal shares follow `quotas`.
  void rebalance(const std::map<int, double>& quotas, std::mt19937_64& rng);

  /// Uniform quotas over the goal ids present.
  [[nodiscard]] std::map<int, double> uniform_quotas() const;

 private:
  void rebuild(std::vector<Transition> kept);

  std::vector<Transition> data_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
};

}  // namespace ssilkc::rl
