#include "vrrt/lqr.hpp"

#include <cmath>

namespace vrrt {

double TrajectorySegment::arc_length() const {
  double arc = 0.0;
  for (size_t i = 1; i < samples.size(); ++i)
    arc += (samples[i].state.position() - samples[i - 1].state.position()).norm();
  return arc;
}

std::vector<State> TrajectorySegment::states() const {
  std::vector<State> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.state);
  return out;
}

std::optional<LqrGain> solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  constexpr int kMaxIter = 10000;
  constexpr double kTol = 1e-10;

  Eigen::MatrixXd P = Q;
  for (int it = 0; it < kMaxIter; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd M = R + BtP * B;
    const Eigen::MatrixXd Minv = M.inverse();
    Eigen::MatrixXd P_next =
        Q + A.transpose() * P * A - A.transpose() * P * B * Minv * BtP * A;
    P_next = 0.5 * (P_next + P_next.transpose().eval());
    const double delta = (P_next - P).cwiseAbs().maxCoeff();
    P = P_next;
    if (!P.allFinite() || P.cwiseAbs().maxCoeff() > 1e12) return std::nullopt;
    if (delta < kTol) {
      const Eigen::MatrixXd M_final = R + B.transpose() * P * B;
      LqrGain g;
      g.K = M_final.inverse() * B.transpose() * P * A;
      g.P = P;
      g.Q = Q;
      g.R = R;
      return g;
    }
  }
  return std::nullopt;
}

const std::optional<LqrGain>* DareCache::find(double theta, double v) const {
  const auto it = entries_.find({theta, v});
  return it == entries_.end() ? nullptr : &it->second;
}

const std::optional<LqrGain>& DareCache::put(double theta, double v,
                                             std::optional<LqrGain> gain) {
  return entries_[{theta, v}] = std::move(gain);
}

SafetyContext make_safety_context(const WorldModel& world, const SensorSpec& sensor,
                                  const BarrierGains& gains, const Limits& limits,
                                  double vis_margin, bool check_visibility) {
  SafetyContext ctx;
  for (const auto& obs : world.known_obstacles) {
    ctx.barriers.push_back(collision_barrier(obs, world, gains));
    ctx.chains.push_back(collision_chain(obs, world.plan_inflation(), gains));
  }
  ctx.vis = VisibilityParams{sensor, -limits.a_min, vis_margin};
  ctx.check_visibility = check_visibility;
  ctx.bounds = world.bounds;
  ctx.limits = limits;
  ctx.dare_cache = std::make_shared<DareCache>();
  return ctx;
}

namespace {

// State-level and input-level collision checks at one sample.
// Returns false in *state_ok when x is outside some set intersection or the
// bounds; *input_ok refers to psi_r(u) of the executed input.
void check_collision(const SafetyContext& ctx, const State& x, const Control& u,
                     bool* state_ok, bool* input_ok) {
  *state_ok = ctx.bounds.contains(x.position());
  *input_ok = true;
  if (!*state_ok) return;
  for (const auto& chain : ctx.chains) {
    const CollisionChain::Eval e = chain.eval(x);
    if (e.psi0 < -kPsiTol || e.psi1 < -kPsiTol) {
      *state_ok = false;
      return;
    }
    if (e.c0 + e.ca * u.a + e.comega * u.omega < -kPsiTol) *input_ok = false;
  }
}

// Re-checks h_vis over the kept prefix with lookahead windows clamped to
// the prefix end; trims until clean.
void visibility_post_pass(TrajectorySegment& seg, const SafetyContext& ctx) {
  while (seg.samples.size() > 0) {
    std::vector<State> states = seg.states();
    const std::vector<double> arc = cumulative_arc(states);
    int viol = -1;
    for (size_t i = 0; i < states.size(); ++i) {
      if (visibility_constraint(states, arc, static_cast<int>(i), ctx.vis) < 0.0) {
        viol = static_cast<int>(i);
        break;
      }
    }
    if (viol < 0) return;
    seg.samples.resize(viol);
    seg.truncated = true;
    seg.reached = false;
    seg.violation = Violation::kVisibility;
  }
}

}  // namespace

TrajectorySegment lqr_cbf_steer(const State& from, const Eigen::Vector2d& to,
                                const SafetyContext& ctx, const SteerParams& params) {
  TrajectorySegment seg;

  const Eigen::Vector2d offset = to - from.position();
  const double ref_heading = offset.squaredNorm() > 1e-18
                                 ? std::atan2(offset.y(), offset.x())
                                 : from.theta;
  const Eigen::Vector4d x_ref{to.x(), to.y(), ref_heading, 0.0};

  State lin_state = from;
  lin_state.v = std::max(lin_state.v, params.v_lin_floor);
  const std::optional<LqrGain>* gain = nullptr;
  if (ctx.dare_cache) gain = ctx.dare_cache->find(lin_state.theta, lin_state.v);
  std::optional<LqrGain> local;
  if (!gain) {
    const Linearization lin = linearize(lin_state, ctx.limits.dt);
    local = solve_dare(lin.A, lin.B, params.Q, params.R);
    gain = ctx.dare_cache ? &ctx.dare_cache->put(lin_state.theta, lin_state.v, local)
                          : &local;
  }
  if (!gain->has_value()) {
    seg.truncated = true;
    seg.violation = Violation::kInputBounds;
    return seg;
  }

  const double h_range_floor =
      ctx.vis.sensor.range - ctx.vis.margin;  // h_range >= 0 iff d_brake <= this

  State x = from;
  double t = 0.0;
  for (int k = 0;; ++k) {
    Eigen::Vector4d err = x.vec() - x_ref;
    err[2] = wrap_angle(err[2]);
    const Eigen::Vector2d u_raw = -((*gain)->K * err);
    const Control u = clamp_control(Control{u_raw[0], u_raw[1]}, ctx.limits);

    bool state_ok = true, input_ok = true;
    check_collision(ctx, x, u, &state_ok, &input_ok);
    std::optional<Violation> state_violation;
    if (!state_ok) {
      state_violation = Violation::kCollision;
    } else if (ctx.check_visibility &&
               x.v * x.v / (2.0 * ctx.vis.brake_decel) > h_range_floor) {
      // braking distance no longer fits the sensing range
      state_violation = Violation::kVisibility;
    }

    if (state_violation) {
      seg.truncated = true;
      seg.violation = state_violation;
      break;
    }
    if ((x.position() - to).norm() <= params.capture_radius) {
      seg.samples.push_back({x, Control{}, t});
      seg.reached = true;
      break;
    }
    if (k == params.max_horizon) {
      seg.samples.push_back({x, Control{}, t});
      break;
    }
    if (!input_ok) {
      seg.samples.push_back({x, Control{}, t});
      seg.truncated = true;
      seg.violation = Violation::kCollision;
      break;
    }

    seg.samples.push_back({x, u, t});
    x = step(x, u, ctx.limits.dt, ctx.limits);
    t += ctx.limits.dt;
  }

  if (ctx.check_visibility) visibility_post_pass(seg, ctx);
  return seg;
}

}  // namespace vrrt
