#include "vrrt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <json.hpp>

namespace vrrt {

PlannerParams planner_from_config(const Config& cfg) {
  PlannerParams p;
  p.max_iter = static_cast<int>(cfg.number_or("max_iter", p.max_iter));
  p.step_len = cfg.number_or("step_len", p.step_len);
  p.neighbor_radius = cfg.number_or("neighbor_radius", p.neighbor_radius);
  p.goal_bias = cfg.number_or("goal_bias", p.goal_bias);
  if (!cfg.has("seed")) throw ConfigError("config must pin a seed");
  p.seed = static_cast<std::uint64_t>(cfg.number("seed"));
  p.max_neighbors = static_cast<int>(cfg.number_or("max_neighbors", p.max_neighbors));
  p.connect_radius = cfg.number_or("connect_radius", p.connect_radius);
  p.vis_margin = cfg.number_or("vis_margin", p.vis_margin);
  p.gains.gamma1 = cfg.number_or("gamma1", p.gains.gamma1);
  p.gains.gamma2 = cfg.number_or("gamma2", p.gains.gamma2);
  p.steer.max_horizon = static_cast<int>(cfg.number_or("steer_horizon", p.steer.max_horizon));
  p.steer.v_lin_floor = cfg.number_or("v_lin_floor", p.steer.v_lin_floor);
  return p;
}

namespace {

// Deterministic uniform doubles from the raw engine output.
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

double node_cost_from_parent(const Tree& tree, const TreeNode& node) {
  return tree.nodes[node.parent].cost + node.segment.arc_length();
}

bool is_ancestor(const Tree& tree, int candidate, int node) {
  int cur = node;
  while (cur >= 0) {
    if (cur == candidate) return true;
    cur = tree.nodes[cur].parent;
  }
  return false;
}

void propagate_cost(Tree& tree, int from) {
  // children adjacency rebuilt on demand; rewires are rare enough
  std::vector<std::vector<int>> children(tree.nodes.size());
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const int p = tree.nodes[i].parent;
    if (p >= 0) children[p].push_back(static_cast<int>(i));
  }
  std::queue<int> q;
  q.push(from);
  while (!q.empty()) {
    const int cur = q.front();
    q.pop();
    for (int ch : children[cur]) {
      tree.nodes[ch].cost = node_cost_from_parent(tree, tree.nodes[ch]);
      q.push(ch);
    }
  }
}

}  // namespace

PlanResult extract_path(const Tree& tree, const Eigen::Vector2d& goal, double goal_tolerance) {
  PlanResult out;
  out.tree = tree;

  int best = -1;
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    if ((tree.nodes[i].state.position() - goal).norm() > goal_tolerance) continue;
    if (best < 0 || tree.nodes[i].cost < tree.nodes[best].cost) best = static_cast<int>(i);
  }
  if (best < 0) return out;

  std::vector<int> branch;
  for (int cur = best; cur >= 0; cur = tree.nodes[cur].parent) branch.push_back(cur);
  std::reverse(branch.begin(), branch.end());

  out.success = true;
  out.branch = branch;
  out.cost = tree.nodes[best].cost;
  double t = 0.0;
  for (size_t bi = 0; bi < branch.size(); ++bi) {
    const TreeNode& node = tree.nodes[branch[bi]];
    out.waypoints.push_back(node.state);
    if (bi == 0) {
      out.path.push_back({node.state, Control{}, 0.0});
      continue;
    }
    const auto& samples = node.segment.samples;
    // skip the joint sample; times re-based onto the concatenated path
    const double t_base = t;
    for (size_t k = 1; k < samples.size(); ++k) {
      out.path.back().control = samples[k - 1].control;
      out.path.push_back({samples[k].state, Control{}, t_base + samples[k].t});
    }
    if (!samples.empty()) t = t_base + samples.back().t;
  }
  return out;
}

PlanResult plan(const WorldModel& world, const SensorSpec& sensor, const Limits& limits,
                const PlannerParams& params,
                const std::function<void(const Tree&, int)>& on_iteration) {
  const SafetyContext ctx = make_safety_context(world, sensor, params.gains, limits,
                                                params.vis_margin, params.enable_visibility);
  SteerParams steer = params.steer;
  steer.capture_radius = params.connect_radius;

  Rng rng(params.seed);
  Tree tree;
  tree.nodes.push_back(TreeNode{world.start, -1, 0.0, {}});

  for (int iter = 1; iter <= params.max_iter; ++iter) {
    // sample (goal-biased), then pull to within step_len of the nearest node
    Eigen::Vector2d target;
    if (rng.uniform() < params.goal_bias) {
      target = world.goal;
    } else {
      target = {rng.uniform(world.bounds.x_min, world.bounds.x_max),
                rng.uniform(world.bounds.y_min, world.bounds.y_max)};
    }

    int nearest = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
      const double d = (tree.nodes[i].state.position() - target).norm();
      if (d < best_d) {
        best_d = d;
        nearest = static_cast<int>(i);
      }
    }
    if (best_d > params.step_len) {
      const Eigen::Vector2d origin = tree.nodes[nearest].state.position();
      target = origin + (target - origin) * (params.step_len / best_d);
    }

    TrajectorySegment seg = lqr_cbf_steer(tree.nodes[nearest].state, target, ctx, steer);
    if ((params.discard_truncated && seg.truncated) || seg.samples.size() < 2) {
      if (on_iteration) on_iteration(tree, iter);
      continue;
    }

    const Eigen::Vector2d new_pos = seg.samples.back().state.position();

    // neighbors of the new position, nearest-first, capped
    std::vector<std::pair<double, int>> neighbors;
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
      const double d = (tree.nodes[i].state.position() - new_pos).norm();
      if (d <= params.neighbor_radius) neighbors.push_back({d, static_cast<int>(i)});
    }
    std::sort(neighbors.begin(), neighbors.end());
    if (params.max_neighbors > 0 &&
        neighbors.size() > static_cast<size_t>(params.max_neighbors))
      neighbors.resize(params.max_neighbors);

    // choose parent: cheapest certified connection to new_pos
    int best_parent = nearest;
    TrajectorySegment best_seg = std::move(seg);
    double best_cost = tree.nodes[nearest].cost + best_seg.arc_length();
    for (const auto& [d, idx] : neighbors) {
      if (idx == nearest) continue;
      TrajectorySegment cand = lqr_cbf_steer(tree.nodes[idx].state, new_pos, ctx, steer);
      if (!cand.reached || cand.truncated) continue;
      const double c = tree.nodes[idx].cost + cand.arc_length();
      if (c < best_cost - 1e-12) {
        best_parent = idx;
        best_seg = std::move(cand);
        best_cost = c;
      }
    }

    TreeNode node;
    node.state = best_seg.samples.back().state;
    node.parent = best_parent;
    node.cost = best_cost;
    node.segment = std::move(best_seg);
    node.segment.truncated = false;  // the stored prefix is certified end to end
    node.segment.violation.reset();
    tree.nodes.push_back(std::move(node));
    const int node_idx = static_cast<int>(tree.nodes.size()) - 1;

    // rewire: reroute neighbors through the new node when cheaper
    for (const auto& [d, idx] : neighbors) {
      if (idx == best_parent || idx == 0) continue;
      if (is_ancestor(tree, idx, node_idx)) continue;
      TrajectorySegment cand = lqr_cbf_steer(
          tree.nodes[node_idx].state, tree.nodes[idx].state.position(), ctx, steer);
      if (!cand.reached || cand.truncated) continue;
      const double c = tree.nodes[node_idx].cost + cand.arc_length();
      if (c < tree.nodes[idx].cost - 1e-12) {
        tree.nodes[idx].parent = node_idx;
        tree.nodes[idx].segment = std::move(cand);
        tree.nodes[idx].cost = c;
        propagate_cost(tree, idx);
      }
    }

    if (on_iteration) on_iteration(tree, iter);
  }

  PlanResult out = extract_path(tree, world.goal, world.goal_tolerance);
  out.iterations = params.max_iter;
  return out;
}

std::string plan_to_json(const PlanResult& plan) {
  nlohmann::ordered_json j;
  j["waypoints"] = nlohmann::ordered_json::array();
  for (const auto& w : plan.waypoints) j["waypoints"].push_back({w.x, w.y, w.theta, w.v});
  j["path"] = nlohmann::ordered_json::array();
  for (const auto& s : plan.path)
    j["path"].push_back({s.state.x, s.state.y, s.state.theta, s.state.v, s.t});
  j["cost"] = plan.cost;
  j["iterations"] = plan.iterations;
  j["success"] = plan.success;
  j["tree_edges"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < plan.tree.nodes.size(); ++i) {
    if (plan.tree.nodes[i].parent >= 0)
      j["tree_edges"].push_back({plan.tree.nodes[i].parent, static_cast<int>(i)});
  }
  return j.dump(2) + "\n";
}

PlanResult plan_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PlanResult out;
  out.success = j.at("success").get<bool>();
  out.cost = j.at("cost").get<double>();
  out.iterations = j.at("iterations").get<int>();
  for (const auto& w : j.at("waypoints"))
    out.waypoints.push_back(State{w.at(0), w.at(1), w.at(2), w.at(3)});
  for (const auto& s : j.at("path"))
    out.path.push_back({State{s.at(0), s.at(1), s.at(2), s.at(3)}, Control{}, s.at(4)});
  return out;
}

}  // namespace vrrt
