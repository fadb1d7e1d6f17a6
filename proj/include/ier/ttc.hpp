#pragma once

#include <span>
#include <vector>

#include "ier/encoder.hpp"
#include "ier/env.hpp"

namespace ier {

struct TTCConfig {
  double threshold = 1.6;   // s
  double v_cap = 13.89;     // m/s
  double accel = 3.0;       // m/s^2 assumed for the ego's own arrival time
  bool cap_arrival = true;  // stop accelerating at v_cap when predicting arrival
  bool first_only = false;  // only the next vehicle per conflict
};

/// Time for the ego to cover `distance` accelerating at cfg.accel until
/// cfg.v_cap, then cruising. Infinite if it can never get there.
double ego_arrival_time(double distance, double v, const TTCConfig& cfg = {});

/// Per conflict, the vehicle with the smallest tto (the next one to arrive).
std::vector<ConflictTiming> first_arrivals(std::span<const ConflictTiming> timings);

/// Accelerate (below v_cap) or maintain while every |tto - tto_ego| exceeds
/// the threshold, decelerate otherwise.
Action ttc_policy(std::span<const ConflictTiming> timings, double ego_speed, const TTCConfig& cfg = {});

}  // namespace ier
