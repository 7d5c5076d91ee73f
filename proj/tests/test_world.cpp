#include <doctest.h>

#include <random>

#include "vrrt/world.hpp"

using namespace vrrt;

namespace {

const char* kBasicEnv =
    "bounds = [0, 0, 10, 10]\n"
    "start = [1, 1, 0, 0]\n"
    "goal = [5, 0.5]\n"
    "goal_tolerance = 0.2\n"
    "robot_radius = 0.3\n"
    "tracking_error = 0.1\n"
    "obstacles = [[5, 5, 1.0]]\n"
    "hidden = [[7, 2, 0.4]]\n";

}  // namespace

TEST_CASE("load_world: empty obstacle lists") {
  const WorldModel w = load_world_text(
      "bounds = [-10, -10, 10, 10]\n"
      "start = [0, 0, 0, 0]\n"
      "goal = [5, 0]\n"
      "goal_tolerance = 0.2\n"
      "robot_radius = 0.3\n"
      "tracking_error = 0.1\n"
      "obstacles = []\n"
      "hidden = []\n");
  CHECK(w.known_obstacles.empty());
  CHECK(w.hidden_obstacles.empty());
  CHECK(w.start.x == 0.0);
  CHECK(w.goal.x() == 5.0);
}

TEST_CASE("load_world: start at an obstacle center is rejected") {
  CHECK_THROWS_AS(load_world_text(
                      "bounds = [0, 0, 10, 10]\n"
                      "start = [5, 5, 0, 0]\n"
                      "goal = [1, 1]\n"
                      "goal_tolerance = 0.2\n"
                      "robot_radius = 0.3\n"
                      "tracking_error = 0.1\n"
                      "obstacles = [[5, 5, 1.0]]\n"),
                  WorldError);
}

TEST_CASE("load_world: goal outside bounds is rejected") {
  CHECK_THROWS_AS(load_world_text(
                      "bounds = [0, 0, 10, 10]\n"
                      "start = [1, 1, 0, 0]\n"
                      "goal = [11, 5]\n"
                      "goal_tolerance = 0.2\n"
                      "robot_radius = 0.3\n"
                      "tracking_error = 0.1\n"),
                  WorldError);
}

TEST_CASE("load_world: full config roundtrip") {
  const WorldModel w = load_world_text(kBasicEnv);
  CHECK(w.hidden_obstacles.size() == 1);
  CHECK(w.known_obstacles.size() == 1);
  CHECK(w.plan_inflation() == doctest::Approx(0.4));
  CHECK(w.without_hidden().hidden_obstacles.empty());
  const WorldModel promoted = w.with_detected({0});
  CHECK(promoted.known_obstacles.size() == 2);
  CHECK(promoted.hidden_obstacles.empty());
}

TEST_CASE("clearance examples") {
  WorldModel w;
  w.bounds = {-10, -10, 10, 10};
  w.known_obstacles.push_back({{0, 0}, 1.0});
  CHECK(clearance({3, 0}, w, false) == doctest::Approx(2.0));
  CHECK(clearance({0, 0}, w, false) == doctest::Approx(-1.0));
  WorldModel empty;
  CHECK(clearance({3, 0}, empty, true) == std::numeric_limits<double>::infinity());
}

TEST_CASE("in_true_free_set examples") {
  WorldModel w;
  w.bounds = {-10, -10, 10, 10};
  w.robot_radius = 0.3;
  w.known_obstacles.push_back({{0, 0}, 1.0});

  CHECK(in_true_free_set(State{3, 0, 0, 0}, w));         // 2 m clearance
  CHECK(in_true_free_set(State{1.3, 0, 0, 0}, w));       // exactly on the inflated boundary
  CHECK_FALSE(in_true_free_set(State{1.29, 0, 0, 0}, w));
  CHECK_FALSE(in_true_free_set(State{11, 0, 0, 0}, w));  // outside bounds
}

TEST_CASE("clearance is 1-Lipschitz") {
  const WorldModel w = load_world_text(kBasicEnv);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-2.0, 12.0);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector2d p{coord(rng), coord(rng)};
    const Eigen::Vector2d q{coord(rng), coord(rng)};
    const double dc = std::abs(clearance(p, w, true) - clearance(q, w, true));
    CHECK(dc <= (p - q).norm() + 1e-12);
  }
}

TEST_CASE("in_true_free_set matches the brute-force definition") {
  const WorldModel w = load_world_text(kBasicEnv);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-1.0, 11.0);
  for (int i = 0; i < 500; ++i) {
    const State s{coord(rng), coord(rng), 0.0, 0.0};
    bool expected = w.bounds.contains(s.position());
    for (const auto& o : w.known_obstacles)
      expected = expected && (s.position() - o.center).norm() - o.radius >= w.robot_radius;
    for (const auto& o : w.hidden_obstacles)
      expected = expected && (s.position() - o.center).norm() - o.radius >= w.robot_radius;
    CHECK(in_true_free_set(s, w) == expected);
  }
}
