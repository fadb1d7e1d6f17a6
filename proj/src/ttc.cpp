#include "ier/ttc.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace ier {

double ego_arrival_time(double distance, double v, const TTCConfig& cfg) {
  if (distance <= 0.0) return 0.0;
  const double a = cfg.accel;
  if (!cfg.cap_arrival) return (-v + std::sqrt(v * v + 2.0 * a * distance)) / a;
  if (v >= cfg.v_cap || a <= 0.0) {
    return v > 0.0 ? distance / v : std::numeric_limits<double>::infinity();
  }
  const double t_cap = (cfg.v_cap - v) / a;
  const double d_cap = v * t_cap + 0.5 * a * t_cap * t_cap;
  if (distance <= d_cap) return (-v + std::sqrt(v * v + 2.0 * a * distance)) / a;
  return t_cap + (distance - d_cap) / cfg.v_cap;
}

std::vector<ConflictTiming> first_arrivals(std::span<const ConflictTiming> timings) {
  std::map<int, ConflictTiming> first;
  for (const auto& c : timings) {
    auto [it, inserted] = first.try_emplace(c.conflict, c);
    if (!inserted && c.tto < it->second.tto) it->second = c;
  }
  std::vector<ConflictTiming> out;
  for (const auto& [idx, c] : first) out.push_back(c);
  return out;
}

Action ttc_policy(std::span<const ConflictTiming> timings, double ego_speed, const TTCConfig& cfg) {
  const auto considered = cfg.first_only ? first_arrivals(timings)
                                         : std::vector<ConflictTiming>(timings.begin(), timings.end());
  for (const auto& c : considered) {
    const double tto_ego = ego_arrival_time(c.ego_distance, ego_speed, cfg);
    if (!(std::abs(c.tto - tto_ego) > cfg.threshold)) return Action::decelerate;
  }
  return ego_speed < cfg.v_cap ? Action::accelerate : Action::maintain;
}

}  // namespace ier
