#include "ier/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace ier {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double time_to_cover(double distance, double v, const char* what) {
  if (distance < 0.0) throw std::invalid_argument(std::string(what) + " distance must be non-negative");
  if (!(v > 0.0)) return kInf;
  return distance / v;
}

bool by_time(const Occupancy& a, const Occupancy& b) {
  return a.tto < b.tto || (a.tto == b.tto && a.ttv < b.ttv);
}

// Worst-case candidate per patch: the earliest occupancy wins.
using Candidate = std::optional<OccupancyUnion>;

void offer(Candidate& slot, const OccupancyUnion& u) {
  if (!slot || u.tto < slot->tto) slot = u;
}

std::optional<OccupancyUnion> earliest_union(std::vector<Occupancy>& occ, double gap) {
  if (occ.empty()) return std::nullopt;
  std::sort(occ.begin(), occ.end(), by_time);
  return merge_unions(occ, gap).front();
}

std::optional<int> first_patch(const Interval& region, double s) {
  if (region.hi <= s) return std::nullopt;
  const double k = region.lo >= s ? std::floor((region.lo - s) / kPatchLength) : 0.0;
  if (k >= kNumPatches) return std::nullopt;
  return static_cast<int>(k);
}

}  // namespace

double compute_tto(double s_start, double v) { return time_to_cover(s_start, v, "s_start"); }

double compute_ttv(double s_end, double v) { return time_to_cover(s_end, v, "s_end"); }

double normalize_time(double t) { return std::min(t, kTimeHorizon) / kTimeHorizon; }

double union_gap_threshold(double ego_length, double ego_speed) {
  return (ego_length + 2.0 * kUnionMargin) / std::max(ego_speed, 1.0);
}

std::vector<OccupancyUnion> merge_unions(std::span<const Occupancy> occupancies, double gap_threshold) {
  if (!std::is_sorted(occupancies.begin(), occupancies.end(),
                      [](const Occupancy& a, const Occupancy& b) { return a.tto < b.tto; })) {
    throw std::invalid_argument("occupancies must be sorted by tto");
  }
  std::vector<OccupancyUnion> unions;
  for (const auto& o : occupancies) {
    if (!unions.empty() && !(o.tto - unions.back().ttv >= gap_threshold)) {
      unions.back().ttv = std::max(unions.back().ttv, o.ttv);
    } else {
      unions.push_back({o.tto, o.ttv, kInf});
    }
  }
  for (std::size_t i = 0; i + 1 < unions.size(); ++i) unions[i].tto_next = unions[i + 1].tto;
  return unions;
}

std::vector<TrackedVehicle> phantoms_from_occlusion(std::span<const LaneShadow> shadows, double speed_limit) {
  std::vector<TrackedVehicle> out;
  for (const auto& lane : shadows) {
    for (const auto& iv : lane.intervals) {
      if (!(iv.length() > 0.0)) continue;
      out.push_back({lane.path_id, iv.hi, speed_limit, iv.length(), true});
    }
  }
  return out;
}

std::vector<LaneShadow> lane_shadows(const WorldState& world, const Scenario& scenario) {
  std::vector<LaneShadow> out;
  if (world.occluders.empty()) return out;
  const Vec2 eye = pose_extrapolated(scenario.ego_path(), world.ego.s_front).position;
  for (int lane : scenario.observed_lanes()) {
    auto intervals = visibility_shadow(eye, world.occluders, scenario.path(lane));
    if (!intervals.empty()) out.push_back({lane, std::move(intervals)});
  }
  return out;
}

std::vector<TrackedVehicle> perceive(const WorldState& world, const Scenario& scenario,
                                     std::span<const LaneShadow> shadows) {
  std::vector<TrackedVehicle> out;
  out.reserve(world.traffic.size());
  for (const auto& v : world.traffic) {
    bool hidden = false;
    for (const auto& lane : shadows) {
      if (lane.path_id != v.path_id) continue;
      for (const auto& iv : lane.intervals) {
        // 1e-9 m slack so a vehicle flush with an interval end still counts as inside
        if (v.s_rear() >= iv.lo - 1e-9 && v.s_front <= iv.hi + 1e-9) hidden = true;
      }
    }
    if (!hidden) out.push_back({v.path_id, v.s_front, v.v, v.length, false});
  }
  const auto phantoms = phantoms_from_occlusion(shadows, scenario.spec().speed_limit);
  out.insert(out.end(), phantoms.begin(), phantoms.end());
  return out;
}

IERFrame encode(std::span<const TrackedVehicle> vehicles, const EgoView& ego,
                std::span<const PathConflict> conflicts, bool include_ibit) {
  IERFrame frame;
  const double s = ego.s_front;
  const double gap = union_gap_threshold(ego.length, ego.v);

  std::array<bool, kNumPatches> valid{};
  for (int k = 0; k < kNumPatches; ++k) valid[k] = s + k * kPatchLength < ego.route_length;

  std::array<Candidate, kNumPatches> best{};
  std::vector<Occupancy> occ;

  for (const auto& c : conflicts) {
    const auto& r = c.region;
    const auto k_first = first_patch(r.ego, s);

    if (r.kind == ConflictKind::crossing) {
      if (!k_first || !valid[*k_first]) continue;
      occ.clear();
      for (const auto& v : vehicles) {
        if (v.path_id != c.path_id || v.s_rear() >= r.other.hi) continue;
        const double tto = v.s_front > r.other.lo ? 0.0 : compute_tto(r.other.lo - v.s_front, v.v);
        occ.push_back({tto, compute_ttv(r.other.hi - v.s_rear(), v.v)});
      }
      if (auto u = earliest_union(occ, gap)) offer(best[*k_first], *u);
      if (include_ibit) frame.patches[*k_first].i_int = 1;
      continue;
    }

    // Same-path corridor: map the lane onto the ego arc and fill every patch
    // the vehicle covers now or will cover.
    for (int k = 0; k < kNumPatches; ++k) {
      if (!valid[k]) continue;
      const double p0 = s + k * kPatchLength;
      const double p1 = p0 + kPatchLength;
      if (p1 <= r.ego.lo || p0 >= r.ego.hi) continue;
      occ.clear();
      for (const auto& v : vehicles) {
        if (v.path_id != c.path_id) continue;
        const double front = v.s_front + r.offset;
        const double rear = front - v.length;
        const bool relevant = front > s || v.s_front < r.other.lo;
        if (!relevant || rear >= p1) continue;
        const double tto = front > p0 ? 0.0 : compute_tto(p0 - front, v.v);
        occ.push_back({tto, compute_ttv(p1 - rear, v.v)});
      }
      if (auto u = earliest_union(occ, gap)) offer(best[k], *u);
    }
    if (include_ibit && r.ego.lo > 0.0 && k_first && valid[*k_first]) frame.patches[*k_first].i_int = 1;
  }

  for (int k = 0; k < kNumPatches; ++k) {
    auto& p = frame.patches[k];
    if (!valid[k]) {
      p = Patch{};
      continue;
    }
    p.tto_ego = normalize_time(compute_tto(k * kPatchLength, ego.v));
    if (best[k]) {
      p.tto = normalize_time(best[k]->tto);
      p.ttv = normalize_time(best[k]->ttv);
      p.tto_next = normalize_time(best[k]->tto_next);
    }
  }
  return frame;
}

std::vector<double> flatten(const IERFrame& frame, bool include_ibit) {
  std::vector<double> out;
  out.reserve(observation_size(include_ibit));
  for (const auto& p : frame.patches) {
    out.push_back(p.tto);
    out.push_back(p.ttv);
    out.push_back(p.tto_next);
    out.push_back(p.tto_ego);
    if (include_ibit) out.push_back(static_cast<double>(p.i_int));
  }
  return out;
}

IERFrame unflatten(std::span<const double> values, bool include_ibit) {
  const std::size_t stride = include_ibit ? kChannelsWithIbit : kChannels;
  if (values.size() != observation_size(include_ibit)) {
    throw std::invalid_argument("observation has the wrong length");
  }
  IERFrame frame;
  for (std::size_t k = 0; k < static_cast<std::size_t>(kNumPatches); ++k) {
    const double* v = values.data() + k * stride;
    auto& p = frame.patches[k];
    p.tto = v[0];
    p.ttv = v[1];
    p.tto_next = v[2];
    p.tto_ego = v[3];
    p.i_int = include_ibit && v[4] > 0.5 ? 1 : 0;
  }
  return frame;
}

std::vector<ConflictTiming> conflict_timings(std::span<const TrackedVehicle> vehicles, const EgoView& ego,
                                             std::span<const PathConflict> conflicts) {
  std::vector<ConflictTiming> out;
  const double s = ego.s_front;
  for (std::size_t ci = 0; ci < conflicts.size(); ++ci) {
    const auto& c = conflicts[ci];
    const auto& r = c.region;
    const int idx = static_cast<int>(ci);
    for (const auto& v : vehicles) {
      if (v.path_id != c.path_id) continue;
      if (r.kind == ConflictKind::crossing) {
        if (s >= r.ego.lo || v.s_rear() >= r.other.hi) continue;
        const double tto = v.s_front > r.other.lo ? 0.0 : compute_tto(r.other.lo - v.s_front, v.v);
        out.push_back({c.path_id, idx, r.ego.lo - s, tto});
        continue;
      }
      const double front = v.s_front + r.offset;
      const double rear = front - v.length;
      if (v.s_front < r.other.lo) {
        if (s >= r.ego.lo) continue;
        out.push_back({c.path_id, idx, r.ego.lo - s, compute_tto(r.other.lo - v.s_front, v.v)});
      } else if (front > s) {
        out.push_back({c.path_id, idx, std::max({rear, r.ego.lo, s}) - s, 0.0});
      }
    }
  }
  return out;
}

}  // namespace ier
