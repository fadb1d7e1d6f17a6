#include "ier/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ier {

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over empty range");
  return std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)), n - 1);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::none: return "none";
    case Outcome::collision: return "collision";
    case Outcome::near_collision: return "near_collision";
    case Outcome::success: return "success";
  }
  return "?";
}

Scenario::Scenario(ScenarioSpec spec) : spec_(std::move(spec)) {
  const auto n_paths = static_cast<int>(spec_.paths.size());
  if (spec_.paths.empty()) throw std::invalid_argument(spec_.name + ": no paths");
  if (spec_.path_names.size() != spec_.paths.size()) {
    throw std::invalid_argument(spec_.name + ": path names do not match paths");
  }
  const auto& route = spec_.ego_route;
  if (route.path_id < 0 || route.path_id >= n_paths) {
    throw std::invalid_argument(spec_.name + ": ego route references unknown path");
  }
  if (!(spec_.speed_limit > 0.0)) throw std::invalid_argument(spec_.name + ": speed limit must be positive");
  if (!(spec_.vehicle.length > 0.0 && spec_.vehicle.width > 0.0)) {
    throw std::invalid_argument(spec_.name + ": vehicle dimensions must be positive");
  }
  const double ego_len = ego_path().length();
  if (!(route.start >= spec_.vehicle.length - 1e-9 && route.start < route.goal && route.goal <= ego_len)) {
    throw std::invalid_argument(spec_.name + ": ego route start/goal outside the ego path");
  }

  std::vector<bool> carries(spec_.paths.size(), false);
  for (const auto& f : spec_.flows) {
    if (f.path_id < 0 || f.path_id >= n_paths) throw std::invalid_argument(spec_.name + ": flow on unknown path");
    const auto ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!ok(f.emit_prob_per_second_initial) || !ok(f.emit_prob_per_second_reduced)) {
      throw std::invalid_argument(spec_.name + ": emission probability outside [0,1]");
    }
    if (f.reduction_time < 0.0 || !(f.flow_speed >= 0.0)) {
      throw std::invalid_argument(spec_.name + ": invalid flow timing or speed");
    }
    carries[static_cast<std::size_t>(f.path_id)] = true;
  }
  if (spec_.leader) {
    if (spec_.leader->speeds.empty() || !(spec_.leader->resample_period > 0.0)) {
      throw std::invalid_argument(spec_.name + ": leader needs speeds and a positive period");
    }
    carries[static_cast<std::size_t>(route.path_id)] = true;
  }

  for (int id = 0; id < n_paths; ++id) {
    if (!carries[static_cast<std::size_t>(id)]) continue;
    for (const auto& region : conflict_regions(ego_path(), path(id))) {
      conflicts_.push_back({id, region});
    }
    const bool conflicting = std::any_of(conflicts_.begin(), conflicts_.end(),
                                         [id](const PathConflict& c) { return c.path_id == id; });
    if (conflicting && id != route.path_id) observed_lanes_.push_back(id);
  }
  std::stable_sort(conflicts_.begin(), conflicts_.end(), [](const PathConflict& a, const PathConflict& b) {
    return a.region.ego.lo < b.region.ego.lo;
  });

  for (const auto& c : conflicts_) {
    const auto& r = c.region;
    if (r.ego.lo > 1.0 && r.ego.lo - route.start < kApproachDistance - kConflictCell) {
      throw std::invalid_argument(spec_.name + ": ego starts less than 100 m before a conflict");
    }
    const bool crossing = r.kind == ConflictKind::crossing;
    if ((crossing && route.goal <= r.ego.hi) || (!crossing && route.goal <= r.ego.lo)) {
      throw std::invalid_argument(spec_.name + ": goal is not beyond the last conflict");
    }
  }
  for (const auto& slot : spec_.occluder_slots) {
    if (slot.side.empty()) throw std::invalid_argument(spec_.name + ": occluder slot without side");
  }
}

double step_probability(double p_per_second, double dt) {
  if (p_per_second <= 0.0) return 0.0;
  return 1.0 - std::pow(1.0 - p_per_second, dt);
}

std::optional<VehicleState> spawn_step(const FlowSpec& flow, double t, double dt, Rng& rng,
                                       std::span<const VehicleState> existing, const VehicleDims& dims) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double p_sec = t < flow.reduction_time ? flow.emit_prob_per_second_initial
                                               : flow.emit_prob_per_second_reduced;
  const double draw = uniform01(rng);
  if (!(draw < step_probability(p_sec, dt))) return std::nullopt;
  for (const auto& v : existing) {
    if (v.path_id == flow.path_id && v.s_rear() < dims.length + kMinSpawnHeadway) return std::nullopt;
  }
  VehicleState spawned;
  spawned.path_id = flow.path_id;
  spawned.s_front = dims.length;
  spawned.v = flow.flow_speed;
  spawned.length = dims.length;
  spawned.width = dims.width;
  return spawned;
}

void advance_traffic(WorldState& world, const Scenario& scenario, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto& leader = scenario.spec().leader;
  for (auto& v : world.traffic) {
    v.s_front += v.v * dt;
    if (v.leader && leader && world.t + dt >= world.leader_next_resample - 1e-9) {
      v.v = leader->speeds[uniform_index(world.rng, leader->speeds.size())];
      world.leader_next_resample += leader->resample_period;
    }
  }
  std::erase_if(world.traffic, [&](const VehicleState& v) {
    return v.s_front > scenario.path(v.path_id).length() + v.length;
  });
}

void spawn_traffic(WorldState& world, const Scenario& scenario, double dt) {
  for (const auto& flow : scenario.spec().flows) {
    if (auto v = spawn_step(flow, world.t, dt, world.rng, world.traffic, scenario.spec().vehicle)) {
      world.traffic.push_back(*v);
    }
  }
}

EgoMotion ego_kinematics(double v, double accel, double dt, double v_cap) {
  const double v_end = v + accel * dt;
  if (v_end < 0.0) {
    const double t_stop = v / -accel;
    return {0.5 * v * t_stop, 0.0};
  }
  if (v_end > v_cap) {
    if (v >= v_cap) return {v * dt, v};
    const double t_cap = (v_cap - v) / accel;
    return {v * t_cap + 0.5 * accel * t_cap * t_cap + v_cap * (dt - t_cap), v_cap};
  }
  return {v * dt + 0.5 * accel * dt * dt, v_end};
}

void advance_ego(WorldState& world, double accel, double dt, double v_cap) {
  const EgoMotion m = ego_kinematics(world.ego.v, accel, dt, v_cap);
  world.ego.s_front += m.ds;
  world.ego.v = m.v;
}

WorldState initialize_world(const Scenario& scenario, std::uint64_t seed, bool occlusions) {
  const auto& spec = scenario.spec();
  WorldState world;
  world.rng.seed(seed);

  if (occlusions) {
    std::vector<std::string> sides;
    for (const auto& slot : spec.occluder_slots) {
      if (std::find(sides.begin(), sides.end(), slot.side) == sides.end()) sides.push_back(slot.side);
    }
    for (const auto& side : sides) {
      std::vector<const OccluderSlot*> candidates;
      for (const auto& slot : spec.occluder_slots) {
        if (slot.side == side) candidates.push_back(&slot);
      }
      world.occluders.push_back(candidates[uniform_index(world.rng, candidates.size())]->polygon);
    }
  }

  world.ego.path_id = spec.ego_route.path_id;
  world.ego.s_front = spec.ego_route.start;
  world.ego.v = kInitialEgoSpeed;
  world.ego.length = spec.vehicle.length;
  world.ego.width = spec.vehicle.width;

  const int pre_roll_steps = static_cast<int>(std::lround(kPreRollSeconds / kStepLength));
  for (int k = 0; k < pre_roll_steps; ++k) {
    world.t = -kPreRollSeconds + k * kStepLength;
    advance_traffic(world, scenario, kStepLength);
    spawn_traffic(world, scenario, kStepLength);
  }
  world.t = 0.0;

  if (spec.leader) {
    VehicleState lead;
    lead.path_id = spec.ego_route.path_id;
    lead.length = spec.vehicle.length;
    lead.width = spec.vehicle.width;
    lead.s_front = world.ego.s_front + spec.leader->gap + lead.length;
    lead.v = spec.leader->speeds[uniform_index(world.rng, spec.leader->speeds.size())];
    lead.leader = true;
    world.traffic.push_back(lead);
    world.leader_next_resample = spec.leader->resample_period;
  }
  return world;
}

Pose pose_extrapolated(const PolylinePath& path, double s) {
  if (s < 0.0) {
    Pose p = path.pose_at(0.0);
    p.position = p.position + s * Vec2{std::cos(p.heading), std::sin(p.heading)};
    return p;
  }
  if (s > path.length()) {
    Pose p = path.pose_at(path.length());
    const double extra = s - path.length();
    p.position = p.position + extra * Vec2{std::cos(p.heading), std::sin(p.heading)};
    return p;
  }
  return path.pose_at(s);
}

namespace {

struct Rect {
  Vec2 center;
  Vec2 axis_u;  // along heading
  Vec2 axis_v;
  double half_u;
  double half_v;
};

Rect footprint(const Scenario& scenario, const VehicleState& v) {
  const Pose pose = pose_extrapolated(scenario.path(v.path_id), v.s_front - 0.5 * v.length);
  const Vec2 u{std::cos(pose.heading), std::sin(pose.heading)};
  return {pose.position, u, {-u.y, u.x}, 0.5 * v.length, 0.5 * v.width};
}

bool separated_on(Vec2 axis, const Rect& a, const Rect& b) {
  const double ra = a.half_u * std::abs(dot(a.axis_u, axis)) + a.half_v * std::abs(dot(a.axis_v, axis));
  const double rb = b.half_u * std::abs(dot(b.axis_u, axis)) + b.half_v * std::abs(dot(b.axis_v, axis));
  return std::abs(dot(b.center - a.center, axis)) > ra + rb;
}

double interval_gap(double lo_a, double hi_a, double lo_b, double hi_b) {
  return std::max({lo_b - hi_a, lo_a - hi_b, 0.0});
}

}  // namespace

bool footprints_overlap(const Scenario& scenario, const VehicleState& a, const VehicleState& b) {
  const Rect ra = footprint(scenario, a);
  const Rect rb = footprint(scenario, b);
  const double reach = ra.half_u + ra.half_v + rb.half_u + rb.half_v;
  if (norm(rb.center - ra.center) > reach) return false;
  return !(separated_on(ra.axis_u, ra, rb) || separated_on(ra.axis_v, ra, rb) ||
           separated_on(rb.axis_u, ra, rb) || separated_on(rb.axis_v, ra, rb));
}

Outcome detect_outcome(const WorldState& world, const Scenario& scenario) {
  const auto& ego = world.ego;
  for (const auto& v : world.traffic) {
    if (footprints_overlap(scenario, ego, v)) return Outcome::collision;
  }

  const double ego_front = ego.s_front;
  const double ego_rear = ego.s_rear();
  for (const auto& c : scenario.conflicts()) {
    const auto& r = c.region;
    if (r.kind == ConflictKind::crossing) {
      if (!(ego_front > r.ego.lo && ego_rear < r.ego.hi)) continue;
      for (const auto& v : world.traffic) {
        if (v.path_id != c.path_id) continue;
        if (interval_gap(v.s_rear(), v.s_front, r.other.lo, r.other.hi) < kNearCollisionClearance) {
          return Outcome::near_collision;
        }
      }
    } else {
      for (const auto& v : world.traffic) {
        if (v.path_id != c.path_id || v.s_front < r.other.lo) continue;
        const double front = v.s_front + r.offset;
        if (front <= ego_front) continue;
        if (front - v.length - ego_front < kNearCollisionGap) return Outcome::near_collision;
      }
    }
  }

  if (ego_front >= scenario.spec().ego_route.goal) return Outcome::success;
  return Outcome::none;
}

}  // namespace ier
