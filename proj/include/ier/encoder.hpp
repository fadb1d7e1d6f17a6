#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ier/geometry.hpp"
#include "ier/traffic.hpp"

namespace ier {

inline constexpr int kNumPatches = 50;
inline constexpr double kPatchLength = 1.0;
inline constexpr double kTimeHorizon = 10.0;
inline constexpr int kChannels = 4;
inline constexpr int kChannelsWithIbit = 5;
/// Clearance kept in front of and behind the ego when judging whether a gap
/// between two vehicles of one lane is passable.
inline constexpr double kUnionMargin = 1.0;

/// Time channels are normalized to [0, 1]; 1 means "not within t_max".
struct Patch {
  double tto = 1.0;
  double ttv = 1.0;
  double tto_next = 1.0;
  double tto_ego = 1.0;
  std::uint8_t i_int = 0;

  friend bool operator==(const Patch&, const Patch&) = default;
};

/// Patch k covers ego arc [s + k, s + k + 1) ahead of the ego front s.
struct IERFrame {
  std::array<Patch, kNumPatches> patches{};

  friend bool operator==(const IERFrame&, const IERFrame&) = default;
};

/// s_start / v, +inf for a standing vehicle. Throws on negative distance.
double compute_tto(double s_start, double v);
/// s_end / v, +inf for a standing vehicle. s_end runs to the vehicle rear.
double compute_ttv(double s_end, double v);
/// min(t, t_max) / t_max.
double normalize_time(double t);

struct Occupancy {
  double tto = 0.0;
  double ttv = 0.0;
};

struct OccupancyUnion {
  double tto = 0.0;
  double ttv = 0.0;
  double tto_next = 0.0;
};

/// Joins consecutive occupancies whose gap is below `gap_threshold` seconds.
/// Input must be sorted by tto (std::invalid_argument otherwise).
std::vector<OccupancyUnion> merge_unions(std::span<const Occupancy> occupancies, double gap_threshold);

/// Time the ego needs to fit into a gap with kUnionMargin on both ends.
double union_gap_threshold(double ego_length, double ego_speed);

/// A vehicle as the agent perceives it. Phantoms stand in for occluded lane
/// stretches.
struct TrackedVehicle {
  int path_id = 0;
  double s_front = 0.0;
  double v = 0.0;
  double length = 0.0;
  bool phantom = false;

  double s_rear() const { return s_front - length; }
};

struct LaneShadow {
  int path_id = 0;
  std::vector<Interval> intervals;
};

/// One worst-case vehicle per occluded interval: front at the downstream end,
/// as long as the interval, driving at the speed limit.
std::vector<TrackedVehicle> phantoms_from_occlusion(std::span<const LaneShadow> shadows, double speed_limit);

/// Occlusion shadows of the observed lanes seen from the ego front center.
std::vector<LaneShadow> lane_shadows(const WorldState& world, const Scenario& scenario);

/// Real vehicles not hidden by `shadows`, followed by the phantoms.
std::vector<TrackedVehicle> perceive(const WorldState& world, const Scenario& scenario,
                                     std::span<const LaneShadow> shadows);

struct EgoView {
  double s_front = 0.0;
  double v = 0.0;
  double length = 5.0;
  double route_length = 0.0;
};

IERFrame encode(std::span<const TrackedVehicle> vehicles, const EgoView& ego,
                std::span<const PathConflict> conflicts, bool include_ibit);

/// Patch-major [tto, ttv, tto_next, tto_ego (, i_int)] x 50.
std::vector<double> flatten(const IERFrame& frame, bool include_ibit);
IERFrame unflatten(std::span<const double> values, bool include_ibit);

inline std::size_t observation_size(bool include_ibit) {
  return static_cast<std::size_t>(kNumPatches) * (include_ibit ? kChannelsWithIbit : kChannels);
}

/// Unclamped occupancy timing of one vehicle at the entry of one conflict,
/// used by rule-based agents.
struct ConflictTiming {
  int path_id = 0;
  int conflict = 0;  // index into the scenario's conflict list
  double ego_distance = 0.0;
  double tto = 0.0;
};

std::vector<ConflictTiming> conflict_timings(std::span<const TrackedVehicle> vehicles, const EgoView& ego,
                                             std::span<const PathConflict> conflicts);

}  // namespace ier
