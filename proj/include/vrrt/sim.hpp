#pragma once

#include "vrrt/control.hpp"
#include "vrrt/planner.hpp"

namespace vrrt {

enum class Outcome { kReachedGoal, kQpInfeasible, kCollision, kReplanExhausted, kTimeout };

std::string outcome_name(Outcome o);
Outcome outcome_from_name(const std::string& name);

struct Detection {
  double t = 0.0;
  int id = -1;  // index into the hidden obstacle list
  Eigen::Vector2d point{0.0, 0.0};
};

struct RunMetrics {
  Outcome outcome = Outcome::kTimeout;
  double path_length = 0.0;
  double sim_time = 0.0;
  double min_clearance = 0.0;  // min over the run of clearance - l_robot
  std::vector<Detection> detections;
  int replans = 0;
  int backup_activations = 0;
};

std::string metrics_to_json(const RunMetrics& m);
RunMetrics metrics_from_json(const std::string& text);
void write_metrics(const RunMetrics& m, const std::string& path);

/// Appends the current footprint to bt and reports hidden obstacles whose
/// disk intersects it for the first time. The detection point is the
/// closest sector point of the disk to the sensor origin.
std::vector<Detection> sense(const State& s, const WorldModel& world, const SensorSpec& spec,
                             LocalFreeSet& bt, std::vector<bool>& already_detected, double t);

enum class ControllerKind { kCbfQp, kGatekeeper };

struct SimParams {
  ControllerKind controller = ControllerKind::kCbfQp;
  TrackerGains gains;
  BarrierGains ctrl_gains;  // chain gains for the runtime CBF rows
  double backup_decel = 1.0;
  int nominal_horizon = 30;       // ticks rolled out per gatekeeper commitment
  double progress_threshold = 0.05;  // m of nominal progress below which we replan
  int replan_budget = 5;
  double timeout = 120.0;  // simulated seconds
};

SimParams sim_from_config(const Config& cfg);

/// Everything a rendering or analysis step may want beyond the metrics.
struct RunResult {
  RunMetrics metrics;
  std::vector<State> trace;
  LocalFreeSet bt;
  PlanResult plan;  // the initial global plan
};

/// Closed-loop execution of a given reference plan. Replans (gatekeeper
/// only) call back into the planner over known + detected obstacles.
RunResult closed_loop(const WorldModel& world, const SensorSpec& sensor, const Limits& limits,
                      const PlanResult& initial_plan, const PlannerParams& planner_params,
                      const SimParams& sim);

/// Full experiment: plan on the hidden-stripped world, then track it.
RunResult run_experiment(const WorldModel& world, const SensorSpec& sensor,
                         const Limits& limits, const PlannerParams& planner_params,
                         const SimParams& sim);

}  // namespace vrrt
