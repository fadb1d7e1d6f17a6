#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ier/traffic.hpp"

namespace ier {

/// Scenario documents are JSON:
///
///   {
///     "name": "Sc02", "description": "...", "speed_limit": 13.89,
///     "vehicle": {"length": 5.0, "width": 1.8},
///     "paths": [{"id": "ego", "width": 1.8, "vertices": [[x, y], ...]}, ...],
///     "flows": [{"path": "east", "emit_prob_per_second_initial": 0.1,
///                "emit_prob_per_second_reduced": 0.05, "reduction_time": 30,
///                "flow_speed": 13.89}],
///     "ego_route": {"path": "ego", "start": 5.0, "goal": 160.0},
///     "occluder_slots": [{"side": "left", "vertices": [[x, y], ...]}],
///     "leader": {"gap": 40, "speeds": [8.33, 11.11, 13.89], "resample_period": 10}
///   }
///
/// "vehicle", "occluder_slots" and "leader" are optional. Throws ConfigError.
ScenarioSpec parse_scenario(std::string_view json_text);
std::string dump_scenario(const ScenarioSpec& spec);
ScenarioSpec load_scenario_file(const std::filesystem::path& file);

/// The thirteen evaluation scenarios, Sc01..Sc13, loaded from `dir`.
class ScenarioLibrary {
 public:
  static ScenarioLibrary load(const std::filesystem::path& dir);

  const std::vector<Scenario>& all() const { return scenarios_; }
  const Scenario& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  /// "all" or a comma separated list of names.
  std::vector<const Scenario*> select(std::string_view selection) const;

 private:
  std::vector<Scenario> scenarios_;
};

inline constexpr const char* kScenarioNames[] = {"Sc01", "Sc02", "Sc03", "Sc04", "Sc05", "Sc06", "Sc07",
                                                 "Sc08", "Sc09", "Sc10", "Sc11", "Sc12", "Sc13"};

/// Compiled-in data directory, overridable with IER_DATA_DIR.
std::filesystem::path default_scenario_dir();

}  // namespace ier
