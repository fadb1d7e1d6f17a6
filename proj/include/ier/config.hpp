#pragma once

#include <filesystem>
#include <string_view>

#include "ier/dqn.hpp"
#include "ier/env.hpp"
#include "ier/ttc.hpp"

namespace ier {

/// Tunable constants for one CLI run. Defaults are the reference values.
struct RunConfig {
  TrainConfig train;
  EnvConfig env;
  TTCConfig ttc;
};

/// Overrides from a JSON document with optional sections:
///
///   {"dqn": {"lr": 2e-4, "gamma": 0.99, "epsilon_final": 0.05, "epsilon_fraction": 0.3,
///            "buffer_size": 50000, "batch_size": 256, "total_steps": 5000000,
///            "per_alpha": 0.6, "per_beta_start": 0.4, "per_beta_end": 1.0,
///            "priority_eps": 1e-6, "target_sync": 0, "warmup": 1000,
///            "hidden": [60, 60], "log_interval": 1000, "eval_interval": 0, "eval_episodes": 50},
///    "env": {"k_c": 115, "k_v_upper": 0.03, "k_v_lower": 0.01, "k_a": 0.002,
///            "v_upper": 14.444, "v_lower": 13.333, "max_steps": 250},
///    "ttc": {"threshold": 1.6, "v_cap": 13.89, "accel": 3.0}}
///
/// Unknown keys are rejected with ConfigError.
RunConfig parse_run_config(std::string_view json_text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& file, RunConfig base = {});

}  // namespace ier
