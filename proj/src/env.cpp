#include "ier/env.hpp"

#include <cmath>
#include <stdexcept>

namespace ier {

double acceleration_of(Action a) {
  switch (a) {
    case Action::accelerate: return 3.0;
    case Action::maintain: return 0.0;
    case Action::decelerate: return -3.0;
  }
  return 0.0;
}

Action action_from_index(int index) {
  if (index < 0 || index >= kNumActions) throw std::out_of_range("action index");
  return static_cast<Action>(index);
}

const char* to_string(Action a) {
  switch (a) {
    case Action::accelerate: return "accelerate";
    case Action::maintain: return "maintain";
    case Action::decelerate: return "decelerate";
  }
  return "?";
}

const char* to_string(EpisodeOutcome o) {
  switch (o) {
    case EpisodeOutcome::running: return "running";
    case EpisodeOutcome::success: return "success";
    case EpisodeOutcome::collision: return "collision";
    case EpisodeOutcome::near_collision: return "near_collision";
    case EpisodeOutcome::timeout: return "timeout";
  }
  return "?";
}

double reward(double v_before, Action a, Outcome after, const RewardWeights& w) {
  double r = 0.0;
  if (after == Outcome::collision || after == Outcome::near_collision) r -= w.k_c;
  if (v_before > w.v_upper) {
    r -= w.k_v_upper * std::abs(v_before - w.v_upper);
  } else if (v_before < w.v_lower) {
    r -= w.k_v_lower * std::abs(v_before - w.v_lower);
  }
  r -= w.k_a * std::abs(acceleration_of(a));
  return r;
}

Environment::Environment(EnvConfig config) : config_(config) {}

std::vector<double> Environment::reset(const Scenario& scenario, std::uint64_t seed) {
  scenario_ = &scenario;
  world_ = initialize_world(scenario, seed, config_.occlusions);
  terminal_ = false;
  outcome_ = EpisodeOutcome::running;
  observe();
  return observation_;
}

StepResult Environment::step(Action action) {
  if (scenario_ == nullptr || terminal_) throw std::logic_error("step on a terminated episode");
  const double v_before = world_.ego.v;
  advance_ego(world_, acceleration_of(action), kStepLength);
  advance_traffic(world_, *scenario_, kStepLength);
  spawn_traffic(world_, *scenario_, kStepLength);
  world_.step_index += 1;
  world_.t = world_.step_index * kStepLength;

  const Outcome out = detect_outcome(world_, *scenario_);
  StepResult result;
  result.reward = reward(v_before, action, out, config_.reward);
  switch (out) {
    case Outcome::collision: outcome_ = EpisodeOutcome::collision; break;
    case Outcome::near_collision: outcome_ = EpisodeOutcome::near_collision; break;
    case Outcome::success: outcome_ = EpisodeOutcome::success; break;
    case Outcome::none:
      outcome_ = world_.step_index >= config_.max_steps ? EpisodeOutcome::timeout : EpisodeOutcome::running;
      break;
  }
  terminal_ = outcome_ != EpisodeOutcome::running;
  observe();
  result.observation = observation_;
  result.terminal = terminal_;
  result.outcome = outcome_;
  return result;
}

EgoView Environment::ego_view() const {
  return {world_.ego.s_front, world_.ego.v, world_.ego.length, scenario_->ego_path().length()};
}

std::vector<ConflictTiming> Environment::conflict_timings() const {
  return ier::conflict_timings(perceived_, ego_view(), scenario_->conflicts());
}

std::size_t Environment::phantom_count() const {
  std::size_t n = 0;
  for (const auto& v : perceived_) n += v.phantom ? 1 : 0;
  return n;
}

void Environment::observe() {
  const auto shadows = lane_shadows(world_, *scenario_);
  perceived_ = perceive(world_, *scenario_, shadows);
  frame_ = encode(perceived_, ego_view(), scenario_->conflicts(), config_.include_ibit);
  observation_ = flatten(frame_, config_.include_ibit);
}

}  // namespace ier
