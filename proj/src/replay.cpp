#include "ier/replay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ier {

namespace {

std::size_t leaf_base_for(std::size_t capacity) {
  std::size_t base = 1;
  while (base < capacity) base <<= 1;
  return base;
}

}  // namespace

SumTree::SumTree(std::size_t capacity)
    : capacity_(capacity), leaf_base_(leaf_base_for(capacity)), nodes_(2 * leaf_base_, 0.0) {
  if (capacity == 0) throw std::invalid_argument("SumTree capacity must be positive");
}

void SumTree::set(std::size_t index, double value) {
  if (index >= capacity_) throw std::out_of_range("SumTree index");
  if (!(value >= 0.0)) throw std::invalid_argument("SumTree values must be non-negative");
  std::size_t i = leaf_base_ + index;
  nodes_[i] = value;
  for (i >>= 1; i >= 1; i >>= 1) nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
}

std::size_t SumTree::find(double mass) const {
  mass = std::clamp(mass, 0.0, total());
  std::size_t i = 1;
  while (i < leaf_base_) {
    const double left = nodes_[2 * i];
    if (mass < left || nodes_[2 * i + 1] <= 0.0) {
      i = 2 * i;
    } else {
      mass -= left;
      i = 2 * i + 1;
    }
  }
  // Round-off can land on an empty leaf at the very end.
  std::size_t leaf = i - leaf_base_;
  while (leaf > 0 && nodes_[leaf_base_ + leaf] <= 0.0) --leaf;
  return std::min(leaf, capacity_ - 1);
}

MinTree::MinTree(std::size_t capacity)
    : leaf_base_(leaf_base_for(capacity)),
      nodes_(2 * leaf_base_, std::numeric_limits<double>::infinity()) {}

void MinTree::set(std::size_t index, double value) {
  std::size_t i = leaf_base_ + index;
  nodes_[i] = value;
  for (i >>= 1; i >= 1; i >>= 1) nodes_[i] = std::min(nodes_[2 * i], nodes_[2 * i + 1]);
}

PrioritizedReplay::PrioritizedReplay(std::size_t capacity, double alpha, double priority_eps)
    : capacity_(capacity), alpha_(alpha), priority_eps_(priority_eps), sum_(capacity), min_(capacity) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void PrioritizedReplay::add(Transition t) {
  const double p = std::pow(max_priority_, alpha_);
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  sum_.set(next_, p);
  min_.set(next_, p);
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

double PrioritizedReplay::probability(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("replay index");
  return sum_.get(index) / sum_.total();
}

SampledBatch PrioritizedReplay::sample(std::size_t batch, double beta, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("sampling from an empty replay buffer");
  SampledBatch out;
  out.indices.reserve(batch);
  out.weights.reserve(batch);
  out.items.reserve(batch);
  const double total = sum_.total();
  const double n = static_cast<double>(size_);
  const double max_weight = std::pow(n * min_.min() / total, -beta);
  for (std::size_t k = 0; k < batch; ++k) {
    const std::size_t idx = sum_.find(uniform01(rng) * total);
    const double prob = sum_.get(idx) / total;
    out.indices.push_back(idx);
    out.weights.push_back(std::pow(n * prob, -beta) / max_weight);
    out.items.push_back(&data_[idx]);
  }
  return out;
}

void PrioritizedReplay::update_priorities(const std::vector<std::size_t>& indices,
                                          const std::vector<double>& td_errors) {
  if (indices.size() != td_errors.size()) throw std::invalid_argument("priority update size mismatch");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double priority = std::abs(td_errors[k]) + priority_eps_;
    max_priority_ = std::max(max_priority_, priority);
    const double p = std::pow(priority, alpha_);
    sum_.set(indices[k], p);
    min_.set(indices[k], p);
  }
}

}  // namespace ier
