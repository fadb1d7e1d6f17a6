#include "scenes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scenes {

using ier::OccluderPolygon;
using ier::PolylinePath;
using ier::Rng;
using ier::ScenarioSpec;
using ier::Vec2;

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * ier::uniform01(rng); }

ScenarioSpec crossing_spec(double cross_at, double ego_length, double width) {
  ScenarioSpec spec;
  spec.name = "crossing";
  spec.path_names = {"ego", "lane"};
  spec.paths.emplace_back(std::vector<Vec2>{{0, 0}, {ego_length, 0}}, width);
  spec.paths.emplace_back(std::vector<Vec2>{{cross_at, -100}, {cross_at, 100}}, width);
  spec.flows.push_back({1, 0.10, 0.05, 30.0, 13.89});
  spec.ego_route = {0, 5.0, ego_length - 10.0};
  return spec;
}

ScenarioSpec following_spec(double length) {
  ScenarioSpec spec;
  spec.name = "following";
  spec.path_names = {"ego"};
  spec.paths.emplace_back(std::vector<Vec2>{{0, 0}, {length, 0}}, 1.8);
  spec.flows.push_back({0, 0.0, 0.0, 30.0, 13.89});
  spec.ego_route = {0, 5.0, length - 10.0};
  return spec;
}

namespace {

OccluderPolygon random_box(Rng& rng, Vec2 center) {
  const double half = uniform(rng, 2.0, 5.0);
  const double rot = uniform(rng, 0.0, std::numbers::pi / 2);
  std::vector<Vec2> v;
  for (int i = 0; i < 4; ++i) {
    const double a = rot + i * std::numbers::pi / 2 + std::numbers::pi / 4;
    v.push_back({center.x + half * std::sqrt(2.0) * std::cos(a), center.y + half * std::sqrt(2.0) * std::sin(a)});
  }
  return OccluderPolygon(std::move(v));
}

Scene try_random_scene(Rng& rng) {
  Scene scene;
  auto& spec = scene.spec;
  spec.name = "random";
  const double bend = uniform(rng, -0.5, 0.5);
  spec.path_names = {"ego"};
  spec.paths.emplace_back(std::vector<Vec2>{{0, 0}, {130, 0}, {130 + 120 * std::cos(bend), 120 * std::sin(bend)}},
                          1.8);
  const PolylinePath ego = spec.paths[0];
  spec.ego_route = {0, 5.0, ego.length() - 2.0};

  const int lanes = 1 + static_cast<int>(ier::uniform_index(rng, 3));
  std::vector<Vec2> junctions;
  for (int i = 0; i < lanes; ++i) {
    const ier::Pose at = ego.pose_at(uniform(rng, 118.0, 220.0));
    double phi = uniform(rng, 0.7, 2.4);
    if (ier::uniform01(rng) < 0.5) phi = -phi;
    const Vec2 d{std::cos(at.heading + phi), std::sin(at.heading + phi)};
    spec.path_names.push_back("lane" + std::to_string(i));
    spec.paths.emplace_back(std::vector<Vec2>{at.position - 100.0 * d, at.position + 100.0 * d}, 1.8);
    spec.flows.push_back({i + 1, 0.1, 0.05, 30.0, 13.89});
    junctions.push_back(at.position);
  }

  scene.ego_s = uniform(rng, 5.0, 200.0);
  scene.ego_v = ier::uniform01(rng) < 0.1 ? 0.0 : uniform(rng, 0.0, ier::kEgoSpeedCap);

  for (int id = 1; id <= lanes; ++id) {
    const auto n = ier::uniform_index(rng, 7);
    for (std::size_t k = 0; k < n; ++k) {
      ier::VehicleState v;
      v.path_id = id;
      v.s_front = uniform(rng, 0.0, 200.0);
      v.v = ier::uniform01(rng) < 0.1 ? 0.0 : uniform(rng, 2.0, 15.0);
      scene.traffic.push_back(v);
    }
  }
  if (ier::uniform01(rng) < 0.5) {
    spec.flows.push_back({0, 0.1, 0.05, 30.0, 13.89});
    const auto n = 1 + ier::uniform_index(rng, 2);
    for (std::size_t k = 0; k < n; ++k) {
      ier::VehicleState v;
      v.path_id = 0;
      v.s_front = std::min(ego.length(), scene.ego_s + uniform(rng, 6.0, 60.0));
      v.v = uniform(rng, 0.0, 14.0);
      scene.traffic.push_back(v);
    }
  }

  const auto n_occ = ier::uniform_index(rng, 3);
  for (std::size_t k = 0; k < n_occ; ++k) {
    const Vec2 j = junctions[ier::uniform_index(rng, junctions.size())];
    const double a = uniform(rng, 0.0, 2 * std::numbers::pi);
    const double r = uniform(rng, 8.0, 20.0);
    scene.occluders.push_back(random_box(rng, {j.x + r * std::cos(a), j.y + r * std::sin(a)}));
  }
  return scene;
}

}  // namespace

Scene random_scene(Rng& rng) {
  for (;;) {
    Scene scene = try_random_scene(rng);
    try {
      ier::Scenario check(scene.spec);
      (void)check;
      return scene;
    } catch (const std::invalid_argument&) {
    }
  }
}

ScenarioSpec transform_spec(const ScenarioSpec& spec, const ier::RigidTransform& tf) {
  ScenarioSpec out = spec;
  out.paths.clear();
  for (const auto& p : spec.paths) out.paths.push_back(p.transformed(tf));
  out.occluder_slots.clear();
  for (const auto& slot : spec.occluder_slots) out.occluder_slots.push_back({slot.side, slot.polygon.transformed(tf)});
  return out;
}

Scene transform_scene(const Scene& scene, const ier::RigidTransform& tf) {
  Scene out = scene;
  out.spec = transform_spec(scene.spec, tf);
  out.occluders.clear();
  for (const auto& o : scene.occluders) out.occluders.push_back(o.transformed(tf));
  return out;
}

ier::IERFrame encode_scene(const Scene& scene, bool include_ibit) {
  const ier::Scenario sc(scene.spec);
  ier::WorldState world;
  world.traffic = scene.traffic;
  world.occluders = scene.occluders;
  world.ego.path_id = scene.spec.ego_route.path_id;
  world.ego.s_front = scene.ego_s;
  world.ego.v = scene.ego_v;
  const auto shadows = ier::lane_shadows(world, sc);
  const auto seen = ier::perceive(world, sc, shadows);
  const ier::EgoView view{scene.ego_s, scene.ego_v, world.ego.length, sc.ego_path().length()};
  return ier::encode(seen, view, sc.conflicts(), include_ibit);
}

ier::RigidTransform random_transform(Rng& rng) {
  return {uniform(rng, -std::numbers::pi, std::numbers::pi), {uniform(rng, -1000, 1000), uniform(rng, -1000, 1000)}};
}

}  // namespace scenes
