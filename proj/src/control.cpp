#include "vrrt/control.hpp"

#include <cmath>

namespace vrrt {

namespace {

constexpr double kFeasTol = 1e-9;

struct NormRow {
  Eigen::Vector2d c;
  double d;
};

bool feasible(const Eigen::Vector2d& u, const std::vector<NormRow>& rows) {
  for (const auto& r : rows)
    if (r.c.dot(u) + r.d < -kFeasTol) return false;
  return true;
}

}  // namespace

std::optional<Control> solve_qp(const QpProblem& p) {
  // Box faces as half-planes, then the CBF rows normalized to |c| = 1 so
  // the feasibility tolerance means the same thing for every row.
  std::vector<NormRow> rows;
  rows.push_back({{1.0, 0.0}, -p.box.a_min});
  rows.push_back({{-1.0, 0.0}, p.box.a_max});
  rows.push_back({{0.0, 1.0}, -p.box.omega_min});
  rows.push_back({{0.0, -1.0}, p.box.omega_max});
  for (const auto& r : p.rows) {
    const double n = r.c.norm();
    if (n < 1e-12) {
      if (r.d < -kFeasTol) return std::nullopt;  // 0.u + d >= 0 fails outright
      continue;
    }
    rows.push_back({r.c / n, r.d / n});
  }

  double best_dist2 = std::numeric_limits<double>::infinity();
  Eigen::Vector2d best{0.0, 0.0};
  bool found = false;
  auto consider = [&](const Eigen::Vector2d& u) {
    if (!feasible(u, rows)) return;
    const double d2 = (u - p.u_nom).squaredNorm();
    if (!found || d2 < best_dist2) {
      best_dist2 = d2;
      best = u;
      found = true;
    }
  };

  consider(p.u_nom);
  // Projections onto each constraint line (rows are unit-normal).
  for (const auto& r : rows) consider(p.u_nom - (r.c.dot(p.u_nom) + r.d) * r.c);
  // Pairwise intersections.
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = i + 1; j < rows.size(); ++j) {
      const double det = rows[i].c.x() * rows[j].c.y() - rows[i].c.y() * rows[j].c.x();
      if (std::abs(det) < 1e-12) continue;
      const Eigen::Vector2d u{(-rows[i].d * rows[j].c.y() + rows[j].d * rows[i].c.y()) / det,
                              (-rows[i].c.x() * rows[j].d + rows[j].c.x() * rows[i].d) / det};
      consider(u);
    }
  }

  if (!found) return std::nullopt;
  return Control{best.x(), best.y()};
}

PathFollower::PathFollower(std::vector<Sample> path, double lookahead)
    : path_(std::move(path)), lookahead_(lookahead) {
  arc_.resize(path_.size(), 0.0);
  for (size_t i = 1; i < path_.size(); ++i)
    arc_[i] = arc_[i - 1] +
              (path_[i].state.position() - path_[i - 1].state.position()).norm();
}

const Sample& PathFollower::target(const Eigen::Vector2d& pos) {
  // forward-only projection: walk while the next sample is no farther
  while (idx_ + 1 < path_.size() &&
         (path_[idx_ + 1].state.position() - pos).norm() <=
             (path_[idx_].state.position() - pos).norm())
    ++idx_;
  size_t j = idx_;
  while (j + 1 < path_.size() && arc_[j] - arc_[idx_] < lookahead_) ++j;
  return path_[j];
}

Control nominal_tracker(const State& s, const Sample& target, double remaining_arc,
                        const TrackerGains& gains, const Limits& lim) {
  const double bear = relative_bearing(s.position(), s.theta, target.state.position());
  double v_des = gains.v_cruise * std::max(0.0, std::cos(bear));
  if (remaining_arc < gains.goal_slow_radius)
    v_des *= std::max(remaining_arc, 0.05) / gains.goal_slow_radius;
  const Control u{gains.k_v * (v_des - s.v), gains.k_omega * bear};
  return clamp_control(u, lim);
}

namespace {
const UnicycleSystem& unicycle() {
  static const UnicycleSystem sys;
  return sys;
}
}  // namespace

std::optional<Control> cbf_qp_track(const State& s, const Sample& target,
                                    double remaining_arc,
                                    const std::vector<BarrierSpec>& barriers,
                                    const TrackerGains& gains, const Limits& lim) {
  QpProblem qp;
  qp.u_nom = nominal_tracker(s, target, remaining_arc, gains, lim).vec();
  qp.box = lim;
  const Eigen::Vector4d xv = s.vec();
  for (const auto& b : barriers) {
    const PsiSeries series = eval_psi_series(b, unicycle(), xv);
    qp.rows.push_back({{series.c[0], series.c[1]}, series.c0});
  }
  return solve_qp(qp);
}

TrajectorySegment brake_rollout(const State& from, double decel, const Limits& lim,
                                double t0) {
  TrajectorySegment seg;
  const Control u{-decel, 0.0};
  State x = from;
  double t = t0;
  // v_min clamp in step() pins v to 0 once the decel crosses it.
  while (true) {
    if (x.v <= 1e-12) {
      x.v = 0.0;
      seg.samples.push_back({x, Control{}, t});
      break;
    }
    seg.samples.push_back({x, u, t});
    x = step(x, u, lim.dt, lim);
    t += lim.dt;
  }
  return seg;
}

CommitDecision gatekeeper_commit(const TrajectorySegment& nominal, const LocalFreeSet& bt,
                                 double backup_decel, const Limits& lim,
                                 double progress_threshold) {
  CommitDecision out;
  const auto& ns = nominal.samples;
  const int n = static_cast<int>(ns.size());

  auto brake_ok = [&](const State& s) {
    const TrajectorySegment brake = brake_rollout(s, backup_decel, lim);
    for (const auto& smp : brake.samples)
      if (!bt.contains(smp.state.position())) return false;
    return true;
  };

  int best_k = -1;
  for (int k = 0; k < n; ++k) {
    if (!bt.contains(ns[k].state.position())) break;  // prefix must be contiguous
    if (brake_ok(ns[k].state)) best_k = k;
  }

  if (best_k < 0) {
    out.replan_requested = true;
    return out;
  }

  double progress = 0.0;
  for (int k = 1; k <= best_k; ++k)
    progress += (ns[k].state.position() - ns[k - 1].state.position()).norm();

  if (best_k == n - 1) {
    out.committed = nominal;
  } else {
    out.used_backup = true;
    out.committed.samples.assign(ns.begin(), ns.begin() + best_k + 1);
    const TrajectorySegment brake =
        brake_rollout(ns[best_k].state, backup_decel, lim, ns[best_k].t);
    // first braking sample duplicates the prefix endpoint state
    out.committed.samples.back() = brake.samples.front();
    out.committed.samples.insert(out.committed.samples.end(), brake.samples.begin() + 1,
                                 brake.samples.end());
  }

  // a commitment that ends stopped without covering the progress threshold
  // cannot get the robot anywhere; global replanning is required
  const bool ends_stopped = out.committed.samples.back().state.v <= 1e-9;
  if (ends_stopped && progress < progress_threshold) out.replan_requested = true;
  return out;
}

}  // namespace vrrt
