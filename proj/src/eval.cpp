#include "ier/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include <fmt/format.h>

#include "ier/error.hpp"

namespace ier {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t episode_seed(std::uint64_t seed, std::string_view scenario, int episode) {
  return mix_seed(mix_seed(seed, fnv1a(scenario)), static_cast<std::uint64_t>(episode));
}

EpisodeOutcome play_episode(Policy& policy, Environment& env, const Scenario& scenario, std::uint64_t seed) {
  policy.begin_episode(seed);
  env.reset(scenario, seed);
  while (!env.terminal()) env.step(policy.act(env));
  return env.outcome();
}

EvalRow run_eval(const Policy& policy, const Scenario& scenario, int n_episodes, const EvalOptions& opts) {
  EvalRow row;
  row.scenario = scenario.name();
  row.agent = policy.name();
  if (n_episodes < 0) throw ConfigError("episode count must be non-negative");
  if (n_episodes == 0) {
    std::fprintf(stderr, "warning: 0 episodes requested for %s, reporting SR = ETR = 0\n", scenario.name().c_str());
    return row;
  }
  EnvConfig env_cfg = opts.env;
  env_cfg.occlusions = opts.occlusions;
  if (const auto ibit = policy.required_ibit()) {
    if (opts.env.include_ibit && !*ibit) throw ConfigError("policy network was built without the intersection bit");
    env_cfg.include_ibit = *ibit;
  }

  std::atomic<int> next{0}, successes{0}, early{0}, timeouts{0};
  auto worker = [&] {
    auto local = policy.clone();
    Environment env(env_cfg);
    for (int i = next++; i < n_episodes; i = next++) {
      switch (play_episode(*local, env, scenario, episode_seed(opts.seed, scenario.name(), i))) {
        case EpisodeOutcome::success: ++successes; break;
        case EpisodeOutcome::collision:
        case EpisodeOutcome::near_collision: ++early; break;
        default: ++timeouts; break;
      }
    }
  };
  const int jobs = std::max(1, std::min(opts.jobs, n_episodes));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  row.episodes = n_episodes;
  row.successes = successes;
  row.early_terminations = early;
  row.timeouts = timeouts;
  return row;
}

EvalRow mean_row(const std::vector<EvalRow>& rows) {
  EvalRow m;
  m.scenario = "Mean";
  m.agent = rows.empty() ? "" : rows.front().agent;
  for (const auto& r : rows) {
    m.episodes += r.episodes;
    m.timeouts += r.timeouts;
    if (r.agent != m.agent) m.agent = "mixed";
  }
  return m;
}

MeanRates mean_rates(const std::vector<EvalRow>& rows) {
  if (rows.empty()) return {0.0, 0.0};
  double sr = 0.0, etr = 0.0;
  for (const auto& r : rows) {
    sr += r.sr();
    etr += r.etr();
  }
  return {sr / static_cast<double>(rows.size()), etr / static_cast<double>(rows.size())};
}

std::string format_percent(double fraction) { return fmt::format("{:.1f} %", 100.0 * fraction); }

std::string report_csv(const std::vector<EvalRow>& rows) {
  std::string out = "scenario,agent,episodes,SR,ETR,timeouts\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{:.1f},{:.1f},{}\n", r.scenario, r.agent, r.episodes, 100.0 * r.sr(),
                       100.0 * r.etr(), r.timeouts);
  }
  const EvalRow m = mean_row(rows);
  const MeanRates rates = mean_rates(rows);
  out += fmt::format("{},{},{},{:.1f},{:.1f},{}\n", m.scenario, m.agent, m.episodes, 100.0 * rates.sr,
                     100.0 * rates.etr, m.timeouts);
  return out;
}

std::string report_table(const std::vector<EvalRow>& rows) {
  std::string out = fmt::format("{:<10}{:<20}{:>10}{:>10}{:>10}{:>10}\n", "Scenario", "Agent", "Episodes", "SR",
                                "ETR", "Timeouts");
  for (const auto& r : rows) {
    out += fmt::format("{:<10}{:<20}{:>10}{:>10}{:>10}{:>10}\n", r.scenario, r.agent, r.episodes,
                       format_percent(r.sr()), format_percent(r.etr()), r.timeouts);
  }
  const EvalRow m = mean_row(rows);
  const MeanRates rates = mean_rates(rows);
  out += fmt::format("{:<10}{:<20}{:>10}{:>10}{:>10}{:>10}\n", m.scenario, m.agent, m.episodes,
                     format_percent(rates.sr), format_percent(rates.etr), m.timeouts);
  return out;
}

}  // namespace ier
