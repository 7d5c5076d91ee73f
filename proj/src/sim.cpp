#include "vrrt/sim.hpp"

#include <fstream>

#include <json.hpp>

namespace vrrt {

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kReachedGoal: return "reached_goal";
    case Outcome::kQpInfeasible: return "qp_infeasible";
    case Outcome::kCollision: return "collision";
    case Outcome::kReplanExhausted: return "replan_exhausted";
    case Outcome::kTimeout: return "timeout";
  }
  return "timeout";
}

Outcome outcome_from_name(const std::string& name) {
  if (name == "reached_goal") return Outcome::kReachedGoal;
  if (name == "qp_infeasible") return Outcome::kQpInfeasible;
  if (name == "collision") return Outcome::kCollision;
  if (name == "replan_exhausted") return Outcome::kReplanExhausted;
  if (name == "timeout") return Outcome::kTimeout;
  throw std::invalid_argument("unknown outcome: " + name);
}

std::string metrics_to_json(const RunMetrics& m) {
  nlohmann::ordered_json j;
  j["outcome"] = outcome_name(m.outcome);
  j["path_length"] = m.path_length;
  j["sim_time"] = m.sim_time;
  j["min_clearance"] = m.min_clearance;
  j["detections"] = nlohmann::ordered_json::array();
  for (const auto& d : m.detections) {
    j["detections"].push_back(
        {{"t", d.t}, {"id", d.id}, {"x", d.point.x()}, {"y", d.point.y()}});
  }
  j["replans"] = m.replans;
  j["backup_activations"] = m.backup_activations;
  return j.dump(2) + "\n";
}

RunMetrics metrics_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunMetrics m;
  m.outcome = outcome_from_name(j.at("outcome").get<std::string>());
  m.path_length = j.at("path_length").get<double>();
  m.sim_time = j.at("sim_time").get<double>();
  m.min_clearance = j.at("min_clearance").get<double>();
  for (const auto& d : j.at("detections"))
    m.detections.push_back(
        {d.at("t").get<double>(), d.at("id").get<int>(),
         Eigen::Vector2d{d.at("x").get<double>(), d.at("y").get<double>()}});
  m.replans = j.at("replans").get<int>();
  m.backup_activations = j.at("backup_activations").get<int>();
  return m;
}

void write_metrics(const RunMetrics& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write metrics file: " + path);
  f << metrics_to_json(m);
}

std::vector<Detection> sense(const State& s, const WorldModel& world, const SensorSpec& spec,
                             LocalFreeSet& bt, std::vector<bool>& already_detected, double t) {
  const Footprint fp{s.position(), s.theta, spec};
  bt.append(fp);
  std::vector<Detection> out;
  for (size_t i = 0; i < world.hidden_obstacles.size(); ++i) {
    if (already_detected[i]) continue;
    const auto hit = sector_disk_closest(fp, world.hidden_obstacles[i]);
    if (hit) {
      already_detected[i] = true;
      out.push_back({t, static_cast<int>(i), *hit});
    }
  }
  return out;
}

SimParams sim_from_config(const Config& cfg) {
  SimParams p;
  p.gains.k_v = cfg.number_or("k_v", p.gains.k_v);
  p.gains.k_omega = cfg.number_or("k_omega", p.gains.k_omega);
  p.gains.lookahead = cfg.number_or("lookahead", p.gains.lookahead);
  p.gains.v_cruise = cfg.number_or("v_cruise", p.gains.v_cruise);
  p.gains.goal_slow_radius = cfg.number_or("goal_slow_radius", p.gains.goal_slow_radius);
  p.ctrl_gains.gamma1 = cfg.number_or("ctrl_gamma1", cfg.number_or("gamma1", 1.0));
  p.ctrl_gains.gamma2 = cfg.number_or("ctrl_gamma2", cfg.number_or("gamma2", 1.0));
  p.backup_decel = cfg.number_or("backup_decel", p.backup_decel);
  p.nominal_horizon = static_cast<int>(cfg.number_or("nominal_horizon", p.nominal_horizon));
  p.progress_threshold = cfg.number_or("progress_threshold", p.progress_threshold);
  p.replan_budget = static_cast<int>(cfg.number_or("replan_budget", p.replan_budget));
  p.timeout = cfg.number_or("timeout", p.timeout);
  return p;
}

namespace {

TrajectorySegment rollout_tracker(const State& from, PathFollower follower, int horizon,
                                  const TrackerGains& gains, const Limits& lim) {
  TrajectorySegment seg;
  State x = from;
  double t = 0.0;
  for (int k = 0; k < horizon; ++k) {
    const Sample& tgt = follower.target(x.position());
    const Control u = nominal_tracker(x, tgt, follower.remaining_arc(), gains, lim);
    seg.samples.push_back({x, u, t});
    x = step(x, u, lim.dt, lim);
    t += lim.dt;
  }
  seg.samples.push_back({x, Control{}, t});
  return seg;
}

}  // namespace

RunResult closed_loop(const WorldModel& world, const SensorSpec& sensor, const Limits& limits,
                      const PlanResult& initial_plan, const PlannerParams& planner_params,
                      const SimParams& sim) {
  RunResult out;
  out.plan = initial_plan;
  RunMetrics& m = out.metrics;

  if (!initial_plan.success || initial_plan.path.empty()) {
    m.outcome = Outcome::kReplanExhausted;  // nothing to track
    return out;
  }

  const double ctrl_inflation = world.robot_radius;
  std::vector<BarrierSpec> barriers;
  for (const auto& o : world.known_obstacles)
    barriers.push_back(collision_barrier(o, ctrl_inflation, sim.ctrl_gains));

  PathFollower follower(initial_plan.path, sim.gains.lookahead);
  State x = world.start;
  std::vector<bool> detected(world.hidden_obstacles.size(), false);
  std::vector<int> detected_ids;

  m.min_clearance = clearance(x.position(), world, true) - world.robot_radius;
  out.trace.push_back(x);

  // gatekeeper commitment queue
  TrajectorySegment committed;
  int committed_idx = 0;
  bool pending_replan = false;

  double t = 0.0;
  while (true) {
    for (const auto& d : sense(x, world, sensor, out.bt, detected, t)) {
      m.detections.push_back(d);
      detected_ids.push_back(d.id);
      barriers.push_back(
          collision_barrier(world.hidden_obstacles[d.id], ctrl_inflation, sim.ctrl_gains));
    }

    if ((x.position() - world.goal).norm() <= world.goal_tolerance) {
      m.outcome = Outcome::kReachedGoal;
      break;
    }
    if (t >= sim.timeout) {
      m.outcome = Outcome::kTimeout;
      break;
    }

    Control u;
    if (sim.controller == ControllerKind::kCbfQp) {
      const Sample& target = follower.target(x.position());
      const auto result = cbf_qp_track(x, target, follower.remaining_arc(), barriers,
                                       sim.gains, limits);
      if (!result) {
        m.outcome = Outcome::kQpInfeasible;
        break;
      }
      u = *result;
    } else {
      // gatekeeper: execute the committed trajectory; when it runs out,
      // replan if the last commitment asked for it, then commit again
      follower.target(x.position());  // keep the projection moving with the robot
      if (committed_idx >= static_cast<int>(committed.samples.size()) - 1) {
        if (pending_replan) {
          pending_replan = false;
          ++m.replans;
          if (m.replans > sim.replan_budget) {
            m.outcome = Outcome::kReplanExhausted;
            break;
          }
          WorldModel view = world.with_detected(detected_ids).without_hidden();
          view.start = x;
          PlannerParams pp = planner_params;
          pp.seed = planner_params.seed + 1000ull * static_cast<unsigned>(m.replans);
          const PlanResult replan = plan(view, sensor, limits, pp);
          if (replan.success)
            follower = PathFollower(replan.path, sim.gains.lookahead);
          // on failure the next commitment will request replanning again
        }
        const TrajectorySegment nominal =
            rollout_tracker(x, follower, sim.nominal_horizon, sim.gains, limits);
        CommitDecision dec = gatekeeper_commit(nominal, out.bt, sim.backup_decel, limits,
                                               sim.progress_threshold);
        if (dec.committed.samples.size() >= 2) {
          committed = std::move(dec.committed);
          committed_idx = 0;
          if (dec.used_backup) ++m.backup_activations;
          if (dec.replan_requested) pending_replan = true;  // stop first, then replan
        } else {
          // nothing executable; hold still and force a replan next tick
          committed = TrajectorySegment{};
          committed_idx = 0;
          pending_replan = true;
        }
      }
      if (committed_idx < static_cast<int>(committed.samples.size()) - 1) {
        u = committed.samples[committed_idx].control;
        ++committed_idx;
      } else {
        u = Control{};  // stationary tick while a replan is pending
      }
    }

    const State x_next = step(x, u, limits.dt, limits);
    m.path_length += (x_next.position() - x.position()).norm();
    x = x_next;
    t += limits.dt;
    out.trace.push_back(x);
    m.min_clearance =
        std::min(m.min_clearance, clearance(x.position(), world, true) - world.robot_radius);
    if (!in_true_free_set(x, world)) {
      m.outcome = Outcome::kCollision;
      break;
    }
  }

  m.sim_time = t;
  return out;
}

RunResult run_experiment(const WorldModel& world, const SensorSpec& sensor,
                         const Limits& limits, const PlannerParams& planner_params,
                         const SimParams& sim) {
  const PlanResult global = plan(world.without_hidden(), sensor, limits, planner_params);
  return closed_loop(world, sensor, limits, global, planner_params, sim);
}

}  // namespace vrrt
