#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ier/encoder.hpp"
#include "ier/traffic.hpp"

namespace ier {

enum class Action : int { accelerate = 0, maintain = 1, decelerate = 2 };
inline constexpr int kNumActions = 3;

double acceleration_of(Action a);
Action action_from_index(int index);
const char* to_string(Action a);

struct RewardWeights {
  double k_c = 115.0;
  double k_v_upper = 0.03;
  double k_v_lower = 0.01;
  double k_a = 0.002;
  double v_upper = 130.0 / 9.0;  // 14.4(4) m/s
  double v_lower = 40.0 / 3.0;   // 13.3(3) m/s
};

/// r = r_collision(s') + r_velocity(s) + r_acceleration(a). `v_before` is the
/// ego speed in s, `after` the outcome observed in s'.
double reward(double v_before, Action a, Outcome after, const RewardWeights& w = {});

enum class EpisodeOutcome { running, success, collision, near_collision, timeout };
const char* to_string(EpisodeOutcome o);

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminal = false;
  EpisodeOutcome outcome = EpisodeOutcome::running;
};

struct EnvConfig {
  RewardWeights reward;
  int max_steps = kMaxSteps;
  bool occlusions = false;
  bool include_ibit = false;
};

/// Episodic reset/step interface over one scenario at a time. Instances are
/// independent; one instance must be driven from a single thread.
class Environment {
 public:
  explicit Environment(EnvConfig config = {});

  /// Throws std::invalid_argument for a scenario without an ego route.
  std::vector<double> reset(const Scenario& scenario, std::uint64_t seed);

  /// Throws std::logic_error when called before reset or after a terminal step.
  StepResult step(Action action);

  const EnvConfig& config() const { return config_; }
  const Scenario& scenario() const { return *scenario_; }
  const WorldState& world() const { return world_; }
  const IERFrame& frame() const { return frame_; }
  const std::vector<double>& observation() const { return observation_; }
  const std::vector<TrackedVehicle>& perceived() const { return perceived_; }
  std::size_t phantom_count() const;
  std::size_t observation_size() const { return ier::observation_size(config_.include_ibit); }
  bool terminal() const { return terminal_; }
  EpisodeOutcome outcome() const { return outcome_; }

  EgoView ego_view() const;
  std::vector<ConflictTiming> conflict_timings() const;

 private:
  void observe();

  EnvConfig config_;
  const Scenario* scenario_ = nullptr;
  WorldState world_;
  IERFrame frame_;
  std::vector<double> observation_;
  std::vector<TrackedVehicle> perceived_;
  bool terminal_ = true;
  EpisodeOutcome outcome_ = EpisodeOutcome::running;
};

}  // namespace ier
