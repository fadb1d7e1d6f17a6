#include "ier/policy.hpp"

#include <stdexcept>

namespace ier {

Action TTCPolicy::act(const Environment& env) {
  const auto timings = env.conflict_timings();
  return ttc_policy(timings, env.world().ego.v, cfg_);
}

Action RandomPolicy::act(const Environment&) {
  return action_from_index(static_cast<int>(uniform_index(rng_, kNumActions)));
}

GreedyQPolicy::GreedyQPolicy(std::shared_ptr<const QNetwork> net, bool include_ibit, std::string name)
    : net_(std::move(net)), include_ibit_(include_ibit), name_(std::move(name)) {
  if (!net_) throw std::invalid_argument("GreedyQPolicy needs a network");
  if (static_cast<std::size_t>(net_->input_size()) != observation_size(include_ibit_)) {
    throw std::invalid_argument("network input width does not match the observation layout");
  }
  if (net_->output_size() != kNumActions) throw std::invalid_argument("network must have one output per action");
}

Action GreedyQPolicy::act(const Environment& env) {
  return action_from_index(greedy_action_index(*net_, env.observation()));
}

}  // namespace ier
