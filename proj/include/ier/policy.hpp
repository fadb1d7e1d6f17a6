#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "ier/env.hpp"
#include "ier/mlp.hpp"
#include "ier/ttc.hpp"

namespace ier {

/// Decision maker driven by the evaluation harness. Instances carry per-episode
/// state (RNG) and are cloned per worker.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual void begin_episode(std::uint64_t /*seed*/) {}
  virtual Action act(const Environment& env) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;

  /// Observation layout the policy was built for, if it reads observations.
  virtual std::optional<bool> required_ibit() const { return std::nullopt; }
};

class TTCPolicy final : public Policy {
 public:
  explicit TTCPolicy(TTCConfig cfg = {}) : cfg_(cfg) {}
  std::string name() const override { return "ttc"; }
  Action act(const Environment& env) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<TTCPolicy>(*this); }

 private:
  TTCConfig cfg_;
};

class RandomPolicy final : public Policy {
 public:
  std::string name() const override { return "random"; }
  void begin_episode(std::uint64_t seed) override { rng_.seed(seed); }
  Action act(const Environment& env) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<RandomPolicy>(*this); }

 private:
  Rng rng_{0};
};

class ConstantPolicy final : public Policy {
 public:
  explicit ConstantPolicy(Action a) : action_(a) {}
  std::string name() const override { return std::string("constant-") + to_string(action_); }
  Action act(const Environment&) override { return action_; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ConstantPolicy>(*this); }

 private:
  Action action_;
};

/// Acts greedily (epsilon = 0) on a Q-network.
class GreedyQPolicy final : public Policy {
 public:
  GreedyQPolicy(std::shared_ptr<const QNetwork> net, bool include_ibit, std::string name = "dqn");
  std::string name() const override { return name_; }
  Action act(const Environment& env) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<GreedyQPolicy>(*this); }
  std::optional<bool> required_ibit() const override { return include_ibit_; }

 private:
  std::shared_ptr<const QNetwork> net_;
  bool include_ibit_;
  std::string name_;
};

}  // namespace ier
