#pragma once

#include "vrrt/lqr.hpp"

namespace vrrt {

/// min |u - u_nom|^2 subject to c.u + d >= 0 rows and the box U.
struct QpProblem {
  Eigen::Vector2d u_nom{0.0, 0.0};
  struct Row {
    Eigen::Vector2d c{0.0, 0.0};
    double d = 0.0;
  };
  std::vector<Row> rows;
  Limits box;
};

/// Exact active-set enumeration over the feasible polygon: the optimum is
/// u_nom, a projection onto one constraint line, or a vertex of two.
/// nullopt means the polygon is empty (the QP is infeasible).
std::optional<Control> solve_qp(const QpProblem& p);

struct TrackerGains {
  double k_v = 1.0;
  double k_omega = 2.0;
  double lookahead = 0.3;      // m, target arc offset along the path
  double v_cruise = 0.8;       // m/s ceiling on straights
  double goal_slow_radius = 0.6;  // m of remaining path over which to taper
  double v_ref_window = 0.5;   // m of path ahead whose max speed caps v_des
  double v_ref_floor = 0.15;   // keeps waypoint speed dips from stalling us
};

/// Walks a reference path monotonically: projects the robot onto the path
/// (forward-only) and targets the sample one lookahead arc ahead, so the
/// tracker cannot stall on a sample it can never capture.
class PathFollower {
 public:
  PathFollower() = default;
  PathFollower(std::vector<Sample> path, double lookahead);

  bool valid() const { return !path_.empty(); }
  const Sample& target(const Eigen::Vector2d& pos);
  const std::vector<Sample>& path() const { return path_; }
  size_t index() const { return idx_; }
  /// Path arc left beyond the current projection.
  double remaining_arc() const { return arc_.empty() ? 0.0 : arc_.back() - arc_[idx_]; }
  /// Max reference speed over the next `window` meters of path: the speed
  /// the certificate allows locally (waypoint dips smoothed out).
  double ref_speed_cap(double window) const;

 private:
  std::vector<Sample> path_;
  std::vector<double> arc_;
  double lookahead_ = 0.3;
  size_t idx_ = 0;
};

/// Proportional waypoint tracker: heading law toward the target sample;
/// speed law commands the cruise speed capped by the local reference speed
/// (ref_cap), scaled down with bearing error and tapered near the path end.
Control nominal_tracker(const State& s, const Sample& target, double remaining_arc,
                        double ref_cap, const TrackerGains& gains, const Limits& lim);

/// CBF-QP tracking: one psi_r half-plane per obstacle barrier on top of
/// the nominal tracker. Infeasible is a value, not a fault.
std::optional<Control> cbf_qp_track(const State& s, const Sample& target,
                                    double remaining_arc,
                                    const std::vector<BarrierSpec>& barriers,
                                    const TrackerGains& gains, const Limits& lim);

/// Straight-heading max-deceleration stop from `from`, sampled with the
/// same integrator as everything else. Ends at v = 0 (v_min clamp).
TrajectorySegment brake_rollout(const State& from, double decel, const Limits& lim,
                                double t0 = 0.0);

struct CommitDecision {
  TrajectorySegment committed;
  bool used_backup = false;
  bool replan_requested = false;
};

/// Commits the longest nominal prefix that stays inside bt and can still
/// brake to a stop inside bt; appends the braking suffix when the prefix
/// is strict. Requests replanning when nothing useful can be committed.
CommitDecision gatekeeper_commit(const TrajectorySegment& nominal, const LocalFreeSet& bt,
                                 double backup_decel, const Limits& lim,
                                 double progress_threshold);

}  // namespace vrrt
