#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "ier/encoder.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace ier;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

EgoView ego_at(double s, double v, double route = 1000.0) { return {s, v, 5.0, route}; }

}  // namespace

TEST_CASE("time to occupied and time to vacant") {
  CHECK(compute_tto(28.0, 14.0) == 2.0);
  CHECK(compute_tto(0.0, 7.0) == 0.0);
  CHECK(compute_tto(10.0, 0.0) == kInf);
  CHECK(normalize_time(compute_tto(10.0, 0.0)) == 1.0);
  CHECK(compute_ttv(35.0, 14.0) == 2.5);
  CHECK(normalize_time(compute_ttv(3.0, 0.0)) == 1.0);
  CHECK_THROWS_AS(compute_tto(-1.0, 3.0), std::invalid_argument);
}

TEST_CASE("ttv of a 5 m vehicle through a 2 m region matches the sweep oracle") {
  const auto sweep = oracle::sweep_occupancy(0.0, 5.0, 14.0, {28.0, 30.0});
  CHECK(sweep.tto == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(sweep.ttv == doctest::Approx(2.5).epsilon(1e-3));
  CHECK(std::abs(compute_ttv(30.0 + 5.0 - 0.0, 14.0) - sweep.ttv) <= 1e-2);
}

TEST_CASE("time normalization") {
  CHECK(normalize_time(12.0) == 1.0);
  CHECK(normalize_time(2.0) == 0.2);
  CHECK(normalize_time(0.0) == 0.0);
  CHECK(normalize_time(kInf) == 1.0);
}

TEST_CASE("union merging") {
  const std::vector<Occupancy> close{{2, 3}, {3.4, 4.5}};
  auto u = merge_unions(close, 0.5);
  REQUIRE(u.size() == 1);
  CHECK(u[0].tto == 2.0);
  CHECK(u[0].ttv == 4.5);
  CHECK(u[0].tto_next == kInf);

  const std::vector<Occupancy> apart{{2, 3}, {6, 7}};
  u = merge_unions(apart, 0.5);
  REQUIRE(u.size() == 2);
  CHECK(u[0].tto_next == 6.0);
  CHECK(u[1].tto_next == kInf);

  CHECK(merge_unions({}, 0.5).empty());

  const std::vector<Occupancy> unsorted{{6, 7}, {2, 3}};
  CHECK_THROWS_AS(merge_unions(unsorted, 0.5), std::invalid_argument);
}

TEST_CASE("union gap threshold depends on ego speed") {
  CHECK(union_gap_threshold(5.0, 7.0) == doctest::Approx(1.0));
  CHECK(union_gap_threshold(5.0, 0.0) == doctest::Approx(7.0));
}

TEST_CASE("empty road frame") {
  const auto frame = encode({}, ego_at(0.0, 10.0), {}, false);
  for (int k = 0; k < kNumPatches; ++k) {
    const auto& p = frame.patches[k];
    CHECK(p.tto == 1.0);
    CHECK(p.ttv == 1.0);
    CHECK(p.tto_next == 1.0);
    CHECK(p.tto_ego == doctest::Approx(std::min(k / 10.0, 10.0) / 10.0));
    CHECK(p.i_int == 0);
  }
  const auto flat = flatten(frame, false);
  CHECK(flat.size() == 200);
  for (std::size_t i = 0; i < flat.size(); i += 4) CHECK(flat[i] == 1.0);
  CHECK(flatten(frame, true).size() == 250);
}

TEST_CASE("standing ego sees every patch as unreachable") {
  const auto frame = encode({}, ego_at(0.0, 0.0), {}, false);
  for (int k = 0; k < kNumPatches; ++k) CHECK(frame.patches[k].tto_ego == 1.0);
}

TEST_CASE("single crossing vehicle lands on the first patch of the conflict") {
  // Conflict first patch at index 12: region starts 12.5 m ahead of the ego front.
  const Scenario sc(scenes::crossing_spec(110.0, 250.0, 2.0));
  REQUIRE(sc.conflicts().size() == 1);
  const auto& r = sc.conflicts()[0].region;
  const double ego_s = r.ego.lo - 12.5;
  TrackedVehicle v{1, r.other.lo - 28.0, 14.0, 5.0, false};
  const std::vector<TrackedVehicle> traffic{v};
  const auto frame = encode(traffic, ego_at(ego_s, 10.0), sc.conflicts(), true);
  const auto sweep = oracle::sweep_occupancy(v.s_front, v.length, v.v, r.other);
  CHECK(frame.patches[12].tto == doctest::Approx(0.2));
  CHECK(std::abs(frame.patches[12].tto * kTimeHorizon - sweep.tto) <= 0.01);
  CHECK(std::abs(frame.patches[12].ttv * kTimeHorizon - sweep.ttv) <= 0.01);
  CHECK(frame.patches[12].i_int == 1);
  for (int k = 0; k < kNumPatches; ++k) {
    if (k == 12) continue;
    CHECK(frame.patches[k].tto == 1.0);
    CHECK(frame.patches[k].i_int == 0);
  }
}

TEST_CASE("stationary leader covers its patches") {
  const PolylinePath lane({{0, 0}, {300, 0}}, 1.8);
  const auto regions = conflict_regions(lane, lane);
  const std::vector<PathConflict> conflicts{{0, regions[0]}};
  const double ego_s = 50.0;
  const std::vector<TrackedVehicle> lead{{0, ego_s + 10.0 + 5.0, 0.0, 5.0, false}};
  const auto frame = encode(lead, ego_at(ego_s, 10.0), conflicts, false);
  for (int k = 0; k < kNumPatches; ++k) {
    if (k >= 10 && k <= 14) {
      CHECK(frame.patches[k].tto == 0.0);
      CHECK(frame.patches[k].ttv == 1.0);
    } else if (k < 10) {
      CHECK(frame.patches[k].tto == 1.0);
    }
  }
}

TEST_CASE("moving leader fills the patches it will reach") {
  const PolylinePath lane({{0, 0}, {300, 0}}, 1.8);
  const std::vector<PathConflict> conflicts{{0, conflict_regions(lane, lane)[0]}};
  const std::vector<TrackedVehicle> lead{{0, 70.0, 5.0, 5.0, false}};
  const auto frame = encode(lead, ego_at(50.0, 10.0), conflicts, false);
  CHECK(frame.patches[15].tto == 0.0);
  CHECK(frame.patches[20].tto == doctest::Approx(normalize_time((70.0 - 70.0) / 5.0)));
  CHECK(frame.patches[25].tto == doctest::Approx(normalize_time(5.0 / 5.0)));
  CHECK(frame.patches[14].tto == 1.0);
}

TEST_CASE("ibit marks each conflict's first patch") {
  auto spec = scenes::crossing_spec(110.0, 250.0, 1.8);
  spec.paths.emplace_back(std::vector<Vec2>{{125, -100}, {125, 100}}, 1.8);
  spec.path_names.push_back("lane2");
  spec.flows.push_back({2, 0.1, 0.05, 30.0, 13.89});
  const Scenario sc(spec);
  REQUIRE(sc.conflicts().size() == 2);
  const auto frame = encode({}, ego_at(100.0, 10.0), sc.conflicts(), true);
  const auto flat = flatten(frame, true);
  int ones = 0;
  for (std::size_t i = 4; i < flat.size(); i += 5) ones += flat[i] == 1.0 ? 1 : 0;
  CHECK(ones == 2);
  CHECK(frame.patches[9].i_int == 1);
  CHECK(frame.patches[24].i_int == 1);
}

TEST_CASE("flatten and unflatten are inverse") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto scene = scenes::random_scene(rng);
    for (bool ibit : {false, true}) {
      const auto frame = scenes::encode_scene(scene, ibit);
      const auto flat = flatten(frame, ibit);
      CHECK(unflatten(flat, ibit) == frame);
    }
  }
  const std::vector<double> short_obs(10, 0.0);
  CHECK_THROWS_AS(unflatten(short_obs, false), std::invalid_argument);
}

TEST_CASE("phantoms from occlusion") {
  const std::vector<LaneShadow> shadows{{1, {{20.0, 50.0}}}};
  const auto ph = phantoms_from_occlusion(shadows, 13.89);
  REQUIRE(ph.size() == 1);
  CHECK(ph[0].length == 30.0);
  CHECK(ph[0].s_front == 50.0);
  CHECK(ph[0].v == 13.89);
  CHECK(ph[0].phantom);
  // Conflict 20 m downstream of the phantom front.
  CHECK(compute_tto(70.0 - ph[0].s_front, ph[0].v) == doctest::Approx(1.44).epsilon(1e-3));
  CHECK(phantoms_from_occlusion({}, 13.89).empty());
}

TEST_CASE("perception hides vehicles inside a shadow and adds phantoms") {
  const Scenario sc(scenes::crossing_spec());
  WorldState w;
  VehicleState hidden, shown;
  hidden.path_id = shown.path_id = 1;
  hidden.s_front = 40.0;
  shown.s_front = 80.0;
  w.traffic = {hidden, shown};
  const std::vector<LaneShadow> shadows{{1, {{30.0, 50.0}}}};
  const auto seen = perceive(w, sc, shadows);
  REQUIRE(seen.size() == 2);
  CHECK(seen[0].s_front == 80.0);
  CHECK_FALSE(seen[0].phantom);
  CHECK(seen[1].phantom);
  CHECK(seen[1].s_front == 50.0);

  const auto clear = perceive(w, sc, {});
  CHECK(clear.size() == 2);
  for (const auto& v : clear) CHECK_FALSE(v.phantom);
}

TEST_CASE("layout independence: straight and curved approaches encode the same") {
  // Straight ego path and a curved one with the conflict at the same arc length.
  // Corridor edges are kept off the 0.05 m sample grid.
  ScenarioSpec straight = scenes::crossing_spec(110.0, 250.0, 1.8);
  straight.paths[1] = PolylinePath({{110.025, -100.025}, {110.025, 100}}, 1.8);
  const Scenario a(straight);
  const auto& ra = a.conflicts()[0].region;

  ScenarioSpec curved = straight;
  std::vector<Vec2> pts{{0, 0}};
  const double R = 40.0;
  for (int i = 1; i <= 20; ++i) {
    const double th = (std::numbers::pi / 2) * i / 20;
    pts.push_back({R * std::sin(th), R - R * std::cos(th)});
  }
  curved.paths[0] = PolylinePath(pts, 1.8);
  const double arc = curved.paths[0].length();
  const Vec2 end = pts.back();
  const double rest = 250.0 - arc;
  curved.paths[0] = PolylinePath([&] {
    auto p = pts;
    p.push_back({end.x, end.y + rest});
    return p;
  }(), 1.8);
  const double at = 110.025 - arc;
  curved.paths[1] = PolylinePath({{end.x - 100.025, end.y + at}, {end.x + 100, end.y + at}}, 1.8);
  const Scenario b(curved);
  const auto& rb = b.conflicts()[0].region;
  REQUIRE(std::abs(ra.ego.lo - rb.ego.lo) < 1e-6);
  REQUIRE(std::abs(ra.other.lo - rb.other.lo) < 1e-6);

  const std::vector<TrackedVehicle> traffic{{1, 60.0, 12.0, 5.0, false}, {1, 20.0, 12.0, 5.0, false}};
  for (double s : {60.0, 80.0, 100.0}) {
    const auto fa = encode(traffic, ego_at(s, 11.0, 250.0), a.conflicts(), true);
    const auto fb = encode(traffic, ego_at(s, 11.0, 250.0), b.conflicts(), true);
    CHECK(fa == fb);
  }
}

TEST_CASE("channels stay in range and frames have 50 patches") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    auto scene = scenes::random_scene(rng);
    const auto frame = scenes::encode_scene(scene, true);
    CHECK(frame.patches.size() == 50);
    for (const auto& p : frame.patches) {
      for (double c : {p.tto, p.ttv, p.tto_next, p.tto_ego}) {
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
      }
    }
  }
}
