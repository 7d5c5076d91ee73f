#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vrrt/config.hpp"
#include "vrrt/dynamics.hpp"

namespace vrrt {

struct WorldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Obstacle {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 0.0;
};

struct Bounds {
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;

  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

/// Environment model. Hidden obstacles exist in the true world but are
/// never handed to the planner; they can only be discovered by sensing.
struct WorldModel {
  Bounds bounds;
  std::vector<Obstacle> known_obstacles;
  std::vector<Obstacle> hidden_obstacles;
  State start;
  Eigen::Vector2d goal{0.0, 0.0};
  double goal_tolerance = 0.2;
  double robot_radius = 0.15;    // l_robot
  double tracking_error = 0.05;  // eps

  /// Total inflation used by planning-time barriers.
  double plan_inflation() const { return robot_radius + tracking_error; }

  /// Copy with the hidden set removed (what the planner is allowed to see).
  WorldModel without_hidden() const;

  /// Copy where the listed hidden obstacles have been promoted to known
  /// (used for replanning after detections).
  WorldModel with_detected(const std::vector<int>& hidden_ids) const;
};

/// Throws WorldError if any invariant is violated (start in collision,
/// goal outside bounds, non-positive radii, ...).
void validate_world(const WorldModel& w);

WorldModel load_world(const Config& cfg);
WorldModel load_world_text(const std::string& text);
WorldModel load_world_file(const std::string& path);

/// Min over the selected obstacles of (|p - center| - radius); +inf when
/// there are none.
double clearance(const Eigen::Vector2d& p, const WorldModel& w, bool include_hidden);

/// True iff the robot disk fits inside the bounds-clipped free space of the
/// full obstacle set (known and hidden). Boundary contact counts as safe.
bool in_true_free_set(const State& s, const WorldModel& w);

}  // namespace vrrt
