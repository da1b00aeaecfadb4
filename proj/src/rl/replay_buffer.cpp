#include "rl/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssilkc::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : data_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::add(const Transition& t) {
  data_[next_] = t;
  next_ = (next_ + 1) % data_.size();
  size_ = std::min(size_ + 1, data_.size());
}

void ReplayBuffer::clear() {
  size_ = 0;
  next_ = 0;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, std::mt19937_64& rng) const {
  if (size_ == 0) throw std::domain_error("ReplayBuffer: sampling from an empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  std::vector<const Transition*> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(n, rng)) out.push_back(&data_[i]);
  return out;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer index");
  return data_[i];
}

Transition& ReplayBuffer::at(std::size_t i) {
  if (i >= size_) throw std::out_of_range("ReplayBuffer index");
  return data_[i];
}

std::map<int, std::size_t> ReplayBuffer::goal_counts() const {
  std::map<int, std::size_t> counts;
  for (std::size_t i = 0; i < size_; ++i) ++counts[data_[i].goal_id];
  return counts;
}

std::size_t ReplayBuffer::reward_bearing_count(double goal_reward) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size_; ++i) n += data_[i].reward == goal_reward ? 1 : 0;
  return n;
}

std::map<int, double> ReplayBuffer::uniform_quotas() const {
  std::map<int, double> q;
  const auto counts = goal_counts();
  for (const auto& [g, n] : counts) q[g] = 1.0 / static_cast<double>(counts.size());
  return q;
}

void ReplayBuffer::rebuild(std::vector<Transition> kept) {
  if (kept.size() > data_.size()) throw std::logic_error("ReplayBuffer: rebuilt contents exceed capacity");
  std::copy(kept.begin(), kept.end(), data_.begin());
  size_ = kept.size();
  next_ = size_ % data_.size();
}

void ReplayBuffer::retain(std::size_t keep, const std::map<int, double>& quotas, std::mt19937_64& rng) {
  double total = 0.0;
  for (const auto& [g, q] : quotas) {
    if (!(q >= 0)) throw std::invalid_argument("ReplayBuffer: negative quota");
    total += q;
  }
  if (total > 1.0 + 1e-9) throw std::invalid_argument("ReplayBuffer: quotas sum above 1");
  std::map<int, std::vector<std::size_t>> by_goal;
  for (std::size_t i = 0; i < size_; ++i) by_goal[data_[i].goal_id].push_back(i);
  std::vector<std::size_t> chosen;
  for (const auto& [g, q] : quotas) {
    auto it = by_goal.find(g);
    if (it == by_goal.end()) continue;
    auto& idx = it->second;
    const auto want = static_cast<std::size_t>(std::llround(q * static_cast<double>(keep)));
    const std::size_t take = std::min(want, idx.size());
    // Partial Fisher-Yates draw of `take` indices.
    for (std::size_t k = 0; k < take; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
      std::swap(idx[k], idx[pick(rng)]);
      chosen.push_back(idx[k]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Transition> kept;
  kept.reserve(chosen.size());
  for (std::size_t i : chosen) kept.push_back(data_[i]);
  rebuild(std::move(kept));
}

void ReplayBuffer::rebalance(const std::map<int, double>& quotas, std::mt19937_64& rng) {
  const auto counts = goal_counts();
  double limit = static_cast<double>(size_);
  for (const auto& [g, q] : quotas) {
    if (q <= 0) continue;
    const auto it = counts.find(g);
    const double have = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    limit = std::min(limit, have / q);
  }
  retain(static_cast<std::size_t>(std::floor(limit)), quotas, rng);
}

}  // namespace ssilkc::rl
