#include "ier/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ier/error.hpp"

namespace ier {

namespace {

using nlohmann::json;
using Setter = std::function<void(const json&)>;

template <typename T>
Setter set(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

void apply(const json& section, std::string_view name, const std::map<std::string, Setter>& setters) {
  if (!section.is_object()) throw ConfigError(fmt::format("config section '{}' must be an object", name));
  for (const auto& [key, value] : section.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(fmt::format("unknown config key '{}.{}'", name, key));
    it->second(value);
  }
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, RunConfig cfg) {
  try {
    const json doc = json::parse(json_text);
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    auto& t = cfg.train;
    auto& r = cfg.env.reward;
    const std::map<std::string, Setter> dqn{
        {"lr", set(t.lr)},
        {"gamma", set(t.gamma)},
        {"epsilon_start", set(t.epsilon_start)},
        {"epsilon_final", set(t.epsilon_final)},
        {"epsilon_fraction", set(t.epsilon_fraction)},
        {"buffer_size", set(t.buffer_size)},
        {"batch_size", set(t.batch_size)},
        {"total_steps", set(t.total_steps)},
        {"per_alpha", set(t.per_alpha)},
        {"per_beta_start", set(t.per_beta_start)},
        {"per_beta_end", set(t.per_beta_end)},
        {"priority_eps", set(t.priority_eps)},
        {"target_sync", set(t.target_sync)},
        {"warmup", set(t.warmup)},
        {"hidden", set(t.hidden)},
        {"log_interval", set(t.log_interval)},
        {"eval_interval", set(t.eval_interval)},
        {"eval_episodes", set(t.eval_episodes)},
    };
    const std::map<std::string, Setter> env{
        {"k_c", set(r.k_c)},
        {"k_v_upper", set(r.k_v_upper)},
        {"k_v_lower", set(r.k_v_lower)},
        {"k_a", set(r.k_a)},
        {"v_upper", set(r.v_upper)},
        {"v_lower", set(r.v_lower)},
        {"max_steps", set(cfg.env.max_steps)},
    };
    const std::map<std::string, Setter> ttc{
        {"threshold", set(cfg.ttc.threshold)},
        {"v_cap", set(cfg.ttc.v_cap)},
        {"accel", set(cfg.ttc.accel)},
        {"cap_arrival", set(cfg.ttc.cap_arrival)},
        {"first_only", set(cfg.ttc.first_only)},
    };
    for (const auto& [key, value] : doc.items()) {
      if (key == "dqn") {
        apply(value, key, dqn);
      } else if (key == "env") {
        apply(value, key, env);
      } else if (key == "ttc") {
        apply(value, key, ttc);
      } else {
        throw ConfigError(fmt::format("unknown config section '{}'", key));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed config: {}", e.what()));
  }
  if (!(cfg.ttc.threshold > 0.0)) throw ConfigError("ttc.threshold must be positive");
  if (!(cfg.train.gamma >= 0.0 && cfg.train.gamma <= 1.0)) throw ConfigError("dqn.gamma must lie in [0, 1]");
  if (cfg.env.max_steps <= 0) throw ConfigError("env.max_steps must be positive");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& file, RunConfig base) {
  std::ifstream in(file);
  if (!in) throw ConfigError(fmt::format("cannot read config {}", file.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

}  // namespace ier
