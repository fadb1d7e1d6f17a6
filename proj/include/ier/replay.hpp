#pragma once

#include <cstddef>
#include <vector>

#include "ier/traffic.hpp"

namespace ier {

/// Binary tree over a fixed number of leaves holding a reduction (sum or min).
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  void set(std::size_t index, double value);
  double get(std::size_t index) const { return nodes_[leaf_base_ + index]; }
  double total() const { return nodes_[1]; }
  /// Leaf whose cumulative range contains `mass` (clamped to [0, total)).
  std::size_t find(double mass) const;

 private:
  std::size_t capacity_;
  std::size_t leaf_base_;
  std::vector<double> nodes_;
};

class MinTree {
 public:
  explicit MinTree(std::size_t capacity);

  void set(std::size_t index, double value);
  double min() const { return nodes_[1]; }

 private:
  std::size_t leaf_base_;
  std::vector<double> nodes_;
};

struct Transition {
  std::vector<float> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<float> next_obs;
  bool terminal = false;  // true only for collision / near-collision / success
};

struct SampledBatch {
  std::vector<std::size_t> indices;
  std::vector<double> weights;
  std::vector<const Transition*> items;
};

/// Proportional prioritized replay with importance-sampling correction.
class PrioritizedReplay {
 public:
  PrioritizedReplay(std::size_t capacity, double alpha, double priority_eps = 1e-6);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  double alpha() const { return alpha_; }
  double max_priority() const { return max_priority_; }

  /// Stored with the current maximum priority; the oldest entry is evicted when full.
  void add(Transition t);
  /// Independent draws proportional to p^alpha; weights (N*P(i))^-beta / max_j w_j.
  SampledBatch sample(std::size_t batch, double beta, Rng& rng) const;
  void update_priorities(const std::vector<std::size_t>& indices, const std::vector<double>& td_errors);

  /// P(i) for the entry stored at slot i.
  double probability(std::size_t index) const;
  const Transition& at(std::size_t index) const { return data_[index]; }

 private:
  std::size_t capacity_;
  double alpha_;
  double priority_eps_;
  double max_priority_ = 1.0;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
  SumTree sum_;
  MinTree min_;
};

}  // namespace ier
