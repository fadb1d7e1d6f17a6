#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ier/geometry.hpp"

namespace ier {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits, identical on every
/// standard library.
double uniform01(Rng& rng);
std::size_t uniform_index(Rng& rng, std::size_t n);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

inline constexpr double kStepLength = 0.4;
inline constexpr int kMaxSteps = 250;
inline constexpr double kEgoSpeedCap = 19.44;
inline constexpr double kInitialEgoSpeed = 13.89;
inline constexpr double kPreRollSeconds = 60.0;
inline constexpr double kMinSpawnHeadway = 8.0;
inline constexpr double kNearCollisionClearance = 10.0;
inline constexpr double kNearCollisionGap = 1.0;
inline constexpr double kApproachDistance = 100.0;

struct VehicleDims {
  double length = 5.0;
  double width = 1.8;
};

struct VehicleState {
  int path_id = 0;
  double s_front = 0.0;
  double v = 0.0;
  double length = 5.0;
  double width = 1.8;
  bool leader = false;

  double s_rear() const { return s_front - length; }
};

struct FlowSpec {
  int path_id = 0;
  double emit_prob_per_second_initial = 0.10;
  double emit_prob_per_second_reduced = 0.05;
  double reduction_time = 30.0;
  double flow_speed = 13.89;
};

/// Car-following lead vehicle with a piecewise-constant speed profile.
struct LeaderSpec {
  double gap = 40.0;
  std::vector<double> speeds;
  double resample_period = 10.0;
};

struct EgoRoute {
  int path_id = 0;
  double start = 0.0;
  double goal = 0.0;
};

struct OccluderSlot {
  std::string side;
  OccluderPolygon polygon;
};

struct ScenarioSpec {
  std::string name;
  std::string description;
  std::vector<std::string> path_names;
  std::vector<PolylinePath> paths;
  std::vector<FlowSpec> flows;
  EgoRoute ego_route;
  std::vector<OccluderSlot> occluder_slots;
  double speed_limit = 13.89;
  VehicleDims vehicle;
  std::optional<LeaderSpec> leader;
};

struct PathConflict {
  int path_id = 0;
  ConflictRegion region;
};

/// ScenarioSpec plus the conflict regions of every traffic-carrying path
/// against the ego route, computed once.
class Scenario {
 public:
  /// Throws std::invalid_argument when the spec violates its invariants.
  explicit Scenario(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  const PolylinePath& ego_path() const { return spec_.paths[spec_.ego_route.path_id]; }
  const PolylinePath& path(int id) const { return spec_.paths[static_cast<std::size_t>(id)]; }
  std::span<const PathConflict> conflicts() const { return conflicts_; }
  bool has_junction() const { return !spec_.occluder_slots.empty(); }

  /// Paths that carry flows and conflict with the ego route.
  const std::vector<int>& observed_lanes() const { return observed_lanes_; }

 private:
  ScenarioSpec spec_;
  std::vector<PathConflict> conflicts_;
  std::vector<int> observed_lanes_;
};

struct WorldState {
  double t = 0.0;
  int step_index = 0;
  std::vector<VehicleState> traffic;
  VehicleState ego;
  std::vector<OccluderPolygon> occluders;
  double leader_next_resample = 0.0;
  Rng rng;
};

enum class Outcome { none, collision, near_collision, success };

const char* to_string(Outcome o);

double step_probability(double p_per_second, double dt);

/// Emission attempt for one flow. One random draw is consumed per call.
std::optional<VehicleState> spawn_step(const FlowSpec& flow, double t, double dt, Rng& rng,
                                       std::span<const VehicleState> existing,
                                       const VehicleDims& dims = {});

/// Moves traffic at constant speed and removes vehicles whose rear has left
/// their path. The ego is never consulted.
void advance_traffic(WorldState& world, const Scenario& scenario, double dt);

/// Runs every flow's emission for this step.
void spawn_traffic(WorldState& world, const Scenario& scenario, double dt);

struct EgoMotion {
  double ds = 0.0;
  double v = 0.0;
};

/// Exact constant-acceleration motion over dt with speed clamped to [0, v_cap].
EgoMotion ego_kinematics(double v, double accel, double dt, double v_cap = kEgoSpeedCap);

void advance_ego(WorldState& world, double accel, double dt, double v_cap = kEgoSpeedCap);

/// Sampled occluders, a placed ego and a traffic pre-roll; t = 0 afterwards.
WorldState initialize_world(const Scenario& scenario, std::uint64_t seed, bool occlusions);

/// Pose on a path, continued linearly past either end.
Pose pose_extrapolated(const PolylinePath& path, double s);

bool footprints_overlap(const Scenario& scenario, const VehicleState& a, const VehicleState& b);

Outcome detect_outcome(const WorldState& world, const Scenario& scenario);

}  // namespace ier
