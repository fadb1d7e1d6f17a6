#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ier/env.hpp"
#include "ier/policy.hpp"

namespace ier {

struct EvalRow {
  std::string scenario;
  std::string agent;
  int episodes = 0;
  int successes = 0;
  int early_terminations = 0;  // collision or near-collision
  int timeouts = 0;

  double sr() const { return episodes > 0 ? static_cast<double>(successes) / episodes : 0.0; }
  double etr() const { return episodes > 0 ? static_cast<double>(early_terminations) / episodes : 0.0; }
  double timeout_rate() const { return episodes > 0 ? static_cast<double>(timeouts) / episodes : 0.0; }
};

struct EvalOptions {
  bool occlusions = false;
  std::uint64_t seed = 0;
  int jobs = 1;
  EnvConfig env;  // occlusions / include_ibit are filled in by run_eval
};

std::uint64_t fnv1a(std::string_view s);
std::uint64_t episode_seed(std::uint64_t seed, std::string_view scenario, int episode);

/// Plays one episode to termination and returns its outcome.
EpisodeOutcome play_episode(Policy& policy, Environment& env, const Scenario& scenario, std::uint64_t seed);

/// Greedy rollouts with per-episode derived seeds. The observation layout
/// follows the policy; throws ConfigError on inconsistent flags.
/// n_episodes == 0 yields an empty row and a warning on stderr.
EvalRow run_eval(const Policy& policy, const Scenario& scenario, int n_episodes, const EvalOptions& opts);

/// Totals over rows: episodes and timeouts summed. Rates are not meaningful
/// on this row; use mean_rates.
EvalRow mean_row(const std::vector<EvalRow>& rows);

/// Unweighted average of the per-row SR and ETR.
struct MeanRates {
  double sr = 0.0;
  double etr = 0.0;
};
MeanRates mean_rates(const std::vector<EvalRow>& rows);

/// "87.7 %"
std::string format_percent(double fraction);

/// CSV with header scenario,agent,episodes,SR,ETR,timeouts and a trailing Mean row.
std::string report_csv(const std::vector<EvalRow>& rows);
/// Fixed-width table with the same rows.
std::string report_table(const std::vector<EvalRow>& rows);

}  // namespace ier
