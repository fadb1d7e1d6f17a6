#include "ier/scenario_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ier/error.hpp"

#ifndef IER_DATA_DIR
#define IER_DATA_DIR "data/scenarios"
#endif

namespace ier {

using nlohmann::json;

namespace {

std::vector<Vec2> read_vertices(const json& arr) {
  std::vector<Vec2> out;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("vertex must be [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

json write_vertices(const std::vector<Vec2>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

int path_index(const std::vector<std::string>& names, const std::string& id) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == id) return static_cast<int>(i);
  }
  throw ConfigError("unknown path id '" + id + "'");
}

ScenarioSpec from_json(const json& j) {
  ScenarioSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.description = j.value("description", "");
  spec.speed_limit = j.at("speed_limit").get<double>();
  if (j.contains("vehicle")) {
    spec.vehicle.length = j["vehicle"].at("length").get<double>();
    spec.vehicle.width = j["vehicle"].at("width").get<double>();
  }
  for (const auto& p : j.at("paths")) {
    const auto id = p.at("id").get<std::string>();
    for (const auto& existing : spec.path_names) {
      if (existing == id) throw ConfigError("duplicate path id '" + id + "'");
    }
    spec.path_names.push_back(id);
    spec.paths.emplace_back(read_vertices(p.at("vertices")), p.value("width", spec.vehicle.width));
  }
  for (const auto& f : j.value("flows", json::array())) {
    FlowSpec flow;
    flow.path_id = path_index(spec.path_names, f.at("path").get<std::string>());
    flow.emit_prob_per_second_initial = f.at("emit_prob_per_second_initial").get<double>();
    flow.emit_prob_per_second_reduced = f.at("emit_prob_per_second_reduced").get<double>();
    flow.reduction_time = f.at("reduction_time").get<double>();
    flow.flow_speed = f.at("flow_speed").get<double>();
    spec.flows.push_back(flow);
  }
  const auto& route = j.at("ego_route");
  spec.ego_route.path_id = path_index(spec.path_names, route.at("path").get<std::string>());
  spec.ego_route.start = route.at("start").get<double>();
  spec.ego_route.goal = route.at("goal").get<double>();
  for (const auto& slot : j.value("occluder_slots", json::array())) {
    spec.occluder_slots.push_back({slot.at("side").get<std::string>(),
                                   OccluderPolygon(read_vertices(slot.at("vertices")))});
  }
  if (j.contains("leader")) {
    const auto& l = j["leader"];
    LeaderSpec leader;
    leader.gap = l.at("gap").get<double>();
    leader.speeds = l.at("speeds").get<std::vector<double>>();
    leader.resample_period = l.at("resample_period").get<double>();
    spec.leader = leader;
  }
  return spec;
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view json_text) {
  try {
    return from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
}

std::string dump_scenario(const ScenarioSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["description"] = spec.description;
  j["speed_limit"] = spec.speed_limit;
  j["vehicle"] = {{"length", spec.vehicle.length}, {"width", spec.vehicle.width}};
  j["paths"] = json::array();
  for (std::size_t i = 0; i < spec.paths.size(); ++i) {
    j["paths"].push_back({{"id", spec.path_names[i]},
                          {"width", spec.paths[i].width()},
                          {"vertices", write_vertices(spec.paths[i].vertices())}});
  }
  j["flows"] = json::array();
  for (const auto& f : spec.flows) {
    j["flows"].push_back({{"path", spec.path_names[static_cast<std::size_t>(f.path_id)]},
                          {"emit_prob_per_second_initial", f.emit_prob_per_second_initial},
                          {"emit_prob_per_second_reduced", f.emit_prob_per_second_reduced},
                          {"reduction_time", f.reduction_time},
                          {"flow_speed", f.flow_speed}});
  }
  j["ego_route"] = {{"path", spec.path_names[static_cast<std::size_t>(spec.ego_route.path_id)]},
                    {"start", spec.ego_route.start},
                    {"goal", spec.ego_route.goal}};
  j["occluder_slots"] = json::array();
  for (const auto& slot : spec.occluder_slots) {
    j["occluder_slots"].push_back({{"side", slot.side}, {"vertices", write_vertices(slot.polygon.vertices())}});
  }
  if (spec.leader) {
    j["leader"] = {{"gap", spec.leader->gap},
                   {"speeds", spec.leader->speeds},
                   {"resample_period", spec.leader->resample_period}};
  }
  return j.dump(2);
}

ScenarioSpec load_scenario_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open scenario file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

ScenarioLibrary ScenarioLibrary::load(const std::filesystem::path& dir) {
  ScenarioLibrary lib;
  for (const char* name : kScenarioNames) {
    auto spec = load_scenario_file(dir / (std::string(name) + ".json"));
    if (spec.name != name) throw ConfigError("scenario file " + std::string(name) + " declares name " + spec.name);
    try {
      lib.scenarios_.emplace_back(std::move(spec));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return lib;
}

const Scenario& ScenarioLibrary::get(std::string_view name) const {
  for (const auto& s : scenarios_) {
    if (s.name() == name) return s;
  }
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

bool ScenarioLibrary::contains(std::string_view name) const {
  for (const auto& s : scenarios_) {
    if (s.name() == name) return true;
  }
  return false;
}

std::vector<const Scenario*> ScenarioLibrary::select(std::string_view selection) const {
  std::vector<const Scenario*> out;
  if (selection == "all") {
    for (const auto& s : scenarios_) out.push_back(&s);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= selection.size()) {
    const auto comma = selection.find(',', pos);
    const auto token = selection.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (!token.empty()) out.push_back(&get(token));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty scenario selection");
  return out;
}

std::filesystem::path default_scenario_dir() {
  if (const char* env = std::getenv("IER_DATA_DIR")) return env;
  return IER_DATA_DIR;
}

}  // namespace ier
