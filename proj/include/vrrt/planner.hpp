#pragma once

#include <cstdint>
#include <functional>

#include "vrrt/lqr.hpp"

namespace vrrt {

struct PlannerParams {
  int max_iter = 2000;
  double step_len = 1.0;
  double neighbor_radius = 2.0;
  double goal_bias = 0.05;
  std::uint64_t seed = 0;
  int max_neighbors = 12;  // nearest-first cap inside the radius
  double connect_radius = 0.05;  // capture tolerance for tree connections
  bool enable_visibility = true;
  bool discard_truncated = false;
  double vis_margin = 0.1;
  BarrierGains gains;
  SteerParams steer;
};

PlannerParams planner_from_config(const Config& cfg);

struct TreeNode {
  State state;
  int parent = -1;  // -1 at the root
  double cost = 0.0;
  TrajectorySegment segment;  // rollout from the parent; empty at the root
};

struct Tree {
  std::vector<TreeNode> nodes;
};

struct PlanResult {
  bool success = false;
  std::vector<State> waypoints;
  std::vector<Sample> path;  // concatenated segment samples, cumulative time
  std::vector<int> branch;   // tree indices root..goal node
  double cost = 0.0;
  int iterations = 0;
  Tree tree;
};

/// Walks parent links back from the cheapest node within goal_tolerance of
/// the goal (ties broken by lower index). success=false when none reaches.
PlanResult extract_path(const Tree& tree, const Eigen::Vector2d& goal, double goal_tolerance);

/// Visibility-Aware RRT*: grows a tree of LQR-CBF steering rollouts with
/// choose-parent and rewiring over a fixed neighbor radius. The planner
/// only ever reads the known obstacles.
PlanResult plan(const WorldModel& world, const SensorSpec& sensor, const Limits& limits,
                const PlannerParams& params,
                const std::function<void(const Tree&, int)>& on_iteration = {});

/// plan.json emission/parsing. The JSON schema is fixed:
/// {waypoints, path, cost, iterations, success, tree_edges}.
std::string plan_to_json(const PlanResult& plan);
PlanResult plan_from_json(const std::string& text);

}  // namespace vrrt
