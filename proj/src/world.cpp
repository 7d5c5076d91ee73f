#include "vrrt/world.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace vrrt {

WorldModel WorldModel::without_hidden() const {
  WorldModel w = *this;
  w.hidden_obstacles.clear();
  return w;
}

WorldModel WorldModel::with_detected(const std::vector<int>& hidden_ids) const {
  WorldModel w = *this;
  w.hidden_obstacles.clear();
  std::vector<bool> promoted(hidden_obstacles.size(), false);
  for (int id : hidden_ids)
    if (id >= 0 && id < static_cast<int>(hidden_obstacles.size())) promoted[id] = true;
  for (size_t i = 0; i < hidden_obstacles.size(); ++i) {
    if (promoted[i])
      w.known_obstacles.push_back(hidden_obstacles[i]);
    else
      w.hidden_obstacles.push_back(hidden_obstacles[i]);
  }
  return w;
}

void validate_world(const WorldModel& w) {
  if (w.bounds.x_max <= w.bounds.x_min || w.bounds.y_max <= w.bounds.y_min)
    throw WorldError("bounds must span a non-empty rectangle");
  if (w.goal_tolerance <= 0.0) throw WorldError("goal_tolerance must be > 0");
  if (w.robot_radius <= 0.0) throw WorldError("robot_radius must be > 0");
  if (w.tracking_error < 0.0) throw WorldError("tracking_error must be >= 0");
  for (const auto& o : w.known_obstacles)
    if (o.radius <= 0.0) throw WorldError("obstacle radius must be > 0");
  for (const auto& o : w.hidden_obstacles)
    if (o.radius <= 0.0) throw WorldError("hidden obstacle radius must be > 0");
  if (!w.bounds.contains(w.goal)) throw WorldError("goal lies outside bounds");
  if (!w.bounds.contains(w.start.position())) throw WorldError("start lies outside bounds");

  // Start must clear every known obstacle inflated by l_robot + eps.
  const double inflation = w.plan_inflation();
  for (const auto& o : w.known_obstacles) {
    double d = (w.start.position() - o.center).norm() - o.radius;
    if (d < inflation) {
      std::ostringstream os;
      os << "start is in collision with a known obstacle (clearance " << d
         << " < required " << inflation << ")";
      throw WorldError(os.str());
    }
  }
}

namespace {

Obstacle obstacle_from(const std::vector<double>& v) {
  if (v.size() != 3) throw WorldError("obstacle entries must be [cx, cy, r]");
  return Obstacle{{v[0], v[1]}, v[2]};
}

std::vector<Obstacle> obstacle_list(const Config& cfg, const std::string& key) {
  std::vector<Obstacle> out;
  if (!cfg.has(key)) return out;
  const ConfigValue& arr = cfg.get(key);
  if (!arr.is_array()) throw WorldError(key + " must be an array");
  for (const auto& item : arr.items) out.push_back(obstacle_from(item.as_number_list()));
  return out;
}

}  // namespace

WorldModel load_world(const Config& cfg) {
  WorldModel w;
  auto b = cfg.number_list("bounds");
  if (b.size() != 4) throw WorldError("bounds must be [xmin, ymin, xmax, ymax]");
  w.bounds = {b[0], b[1], b[2], b[3]};

  auto st = cfg.number_list("start");
  if (st.size() != 4) throw WorldError("start must be [x, y, theta, v]");
  w.start = State{st[0], st[1], wrap_angle(st[2]), st[3]};

  auto g = cfg.number_list("goal");
  if (g.size() != 2) throw WorldError("goal must be [x, y]");
  w.goal = {g[0], g[1]};

  w.goal_tolerance = cfg.number("goal_tolerance");
  w.robot_radius = cfg.number("robot_radius");
  w.tracking_error = cfg.number("tracking_error");
  w.known_obstacles = obstacle_list(cfg, "obstacles");
  w.hidden_obstacles = obstacle_list(cfg, "hidden");

  validate_world(w);
  return w;
}

WorldModel load_world_text(const std::string& text) { return load_world(Config::parse(text)); }

WorldModel load_world_file(const std::string& path) { return load_world(Config::load_file(path)); }

double clearance(const Eigen::Vector2d& p, const WorldModel& w, bool include_hidden) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : w.known_obstacles)
    best = std::min(best, (p - o.center).norm() - o.radius);
  if (include_hidden)
    for (const auto& o : w.hidden_obstacles)
      best = std::min(best, (p - o.center).norm() - o.radius);
  return best;
}

bool in_true_free_set(const State& s, const WorldModel& w) {
  if (!w.bounds.contains(s.position())) return false;
  return clearance(s.position(), w, true) >= w.robot_radius;
}

}  // namespace vrrt
