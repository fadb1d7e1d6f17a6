#include <doctest.h>

#include <cmath>

#include "ier/env.hpp"
#include "ier/scenario_io.hpp"
#include "scenes.hpp"

using namespace ier;

namespace {

const ScenarioLibrary& library() {
  static const ScenarioLibrary lib = ScenarioLibrary::load(default_scenario_dir());
  return lib;
}

}  // namespace

TEST_CASE("reward examples") {
  CHECK(reward(10.0, Action::maintain, Outcome::none) == doctest::Approx(-0.01 * (40.0 / 3.0 - 10.0)));
  CHECK(reward(10.0, Action::maintain, Outcome::none) == doctest::Approx(-0.033333).epsilon(1e-4));
  CHECK(reward(16.0, Action::accelerate, Outcome::none) == doctest::Approx(-0.05267).epsilon(1e-3));
  CHECK(reward(14.0, Action::maintain, Outcome::near_collision) == -115.0);
  CHECK(reward(13.89, Action::maintain, Outcome::none) == 0.0);
  CHECK(reward(13.89, Action::decelerate, Outcome::collision) == doctest::Approx(-115.006));
  CHECK(reward(13.89, Action::maintain, Outcome::success) == 0.0);
}

TEST_CASE("reward bounds") {
  const double lo = -115.0 - 0.03 * (19.44 - 130.0 / 9.0) - 0.006;
  for (double v = 0.0; v <= kEgoSpeedCap; v += 0.01) {
    for (int a = 0; a < kNumActions; ++a) {
      for (Outcome o : {Outcome::none, Outcome::collision, Outcome::near_collision, Outcome::success}) {
        const double r = reward(v, action_from_index(a), o);
        REQUIRE(r <= 0.0);
        REQUIRE(r >= lo - 1e-12);
        const bool zero = v >= 40.0 / 3.0 && v <= 130.0 / 9.0 && a == 1 &&
                          o != Outcome::collision && o != Outcome::near_collision;
        REQUIRE((r == 0.0) == zero);
      }
    }
  }
}

TEST_CASE("action helpers") {
  CHECK(acceleration_of(Action::accelerate) == 3.0);
  CHECK(acceleration_of(Action::maintain) == 0.0);
  CHECK(acceleration_of(Action::decelerate) == -3.0);
  CHECK_THROWS(action_from_index(3));
  CHECK(std::string(to_string(Action::decelerate)) == "decelerate");
}

TEST_CASE("reset is deterministic and has the right layout") {
  const auto& sc = library().get("Sc02");
  Environment env;
  const auto a = env.reset(sc, 42);
  const auto b = env.reset(sc, 42);
  CHECK(a == b);
  CHECK(a.size() == 200);
  CHECK(env.phantom_count() == 0);

  Environment with_ibit(EnvConfig{.include_ibit = true});
  CHECK(with_ibit.reset(sc, 42).size() == 250);
}

TEST_CASE("free road maintain at 13.89 m/s earns zero reward") {
  auto spec = scenes::following_spec(400.0);
  const Scenario sc(spec);
  Environment env;
  env.reset(sc, 1);
  const auto r = env.step(Action::maintain);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.terminal);
}

TEST_CASE("collision ends the episode with the collision penalty") {
  auto spec = scenes::following_spec(400.0);
  spec.leader = LeaderSpec{0.2, {0.0}, 10.0};
  const Scenario sc(spec);
  Environment env;
  env.reset(sc, 1);
  const auto r = env.step(Action::maintain);
  CHECK(r.terminal);
  CHECK(r.outcome == EpisodeOutcome::collision);
  CHECK(r.reward == -115.0);
  CHECK_THROWS_AS(env.step(Action::maintain), std::logic_error);
}

TEST_CASE("episodes time out at 250 steps") {
  const auto& sc = library().get("Sc02");
  Environment env;
  env.reset(sc, 3);
  StepResult r;
  int steps = 0;
  while (!env.terminal()) {
    r = env.step(Action::decelerate);
    ++steps;
  }
  CHECK(steps == kMaxSteps);
  CHECK(r.outcome == EpisodeOutcome::timeout);
}

TEST_CASE("step before reset is rejected") {
  Environment env;
  CHECK_THROWS_AS(env.step(Action::maintain), std::logic_error);
}

TEST_CASE("rollouts are deterministic given seed and actions") {
  const auto& sc = library().get("Sc07");
  Environment a({.occlusions = true}), b({.occlusions = true});
  a.reset(sc, 77);
  b.reset(sc, 77);
  Rng rng(5);
  while (!a.terminal()) {
    const Action act = action_from_index(static_cast<int>(uniform_index(rng, 3)));
    const auto ra = a.step(act);
    const auto rb = b.step(act);
    REQUIRE(ra.observation == rb.observation);
    REQUIRE(ra.reward == rb.reward);
    REQUIRE(a.world().ego.s_front == b.world().ego.s_front);
  }
  CHECK(b.terminal());
}

TEST_CASE("occlusions place one occluder per side on junction scenarios") {
  for (const auto& sc : library().all()) {
    if (!sc.has_junction()) continue;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto world = initialize_world(sc, seed, true);
      CHECK(world.occluders.size() == 2);
    }
    CHECK(initialize_world(sc, 0, false).occluders.empty());
  }
}

TEST_CASE("every episode terminates and outcomes partition") {
  Environment env;
  for (const auto& sc : library().all()) {
    env.reset(sc, 11);
    int steps = 0;
    while (!env.terminal()) {
      env.step(Action::accelerate);
      ++steps;
    }
    CHECK(steps <= kMaxSteps);
    CHECK(env.outcome() != EpisodeOutcome::running);
  }
}
