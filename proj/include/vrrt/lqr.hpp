#pragma once

#include <map>
#include <memory>
#include <optional>

#include "vrrt/safety.hpp"

namespace vrrt {

/// Discrete LQR gain with the Riccati solution it came from.
struct LqrGain {
  Eigen::MatrixXd K;
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
};

/// Fixed-point iteration of the discrete algebraic Riccati equation until
/// the update is below 1e-10 in max norm (at most 10000 iterations).
/// nullopt when the iteration diverges or fails to converge, which is the
/// signature of an unstabilizable linearization.
std::optional<LqrGain> solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

enum class Violation { kCollision, kVisibility, kInputBounds };

struct Sample {
  State state;
  Control control;  // input applied at this sample; zero on the last one
  double t = 0.0;
};

/// A steering rollout. When truncated, `samples` is the certified prefix
/// and `violation` names the first failed check.
struct TrajectorySegment {
  std::vector<Sample> samples;
  bool truncated = false;
  bool reached = false;  // endpoint within capture radius of the target
  std::optional<Violation> violation;

  bool empty() const { return samples.empty(); }
  double arc_length() const;
  std::vector<State> states() const;
};

/// Riccati solutions memoized by linearization state; gains depend only on
/// (theta, v) for fixed weights and dt, and the planner steers from the
/// same nodes over and over.
class DareCache {
 public:
  const std::optional<LqrGain>* find(double theta, double v) const;
  const std::optional<LqrGain>& put(double theta, double v, std::optional<LqrGain> gain);

 private:
  std::map<std::pair<double, double>, std::optional<LqrGain>> entries_;
};

/// Everything the steering loop checks against, prebuilt once per world.
struct SafetyContext {
  std::vector<BarrierSpec> barriers;  // one collision HOCBF per known obstacle
  std::vector<CollisionChain> chains;  // closed-form twins of `barriers`
  VisibilityParams vis;
  bool check_visibility = true;
  Bounds bounds;
  Limits limits;
  std::shared_ptr<DareCache> dare_cache;  // optional; single-threaded use
};

SafetyContext make_safety_context(const WorldModel& world, const SensorSpec& sensor,
                                  const BarrierGains& gains, const Limits& limits,
                                  double vis_margin, bool check_visibility);

struct SteerParams {
  Eigen::Matrix4d Q = Eigen::Vector4d{1.0, 1.0, 0.5, 0.1}.asDiagonal();
  Eigen::Matrix2d R = Eigen::Vector2d{0.5, 0.5}.asDiagonal();
  int max_horizon = 200;
  double capture_radius = 0.2;  // matches the world goal_tolerance
  double v_lin_floor = 0.3;     // keeps the linearization stabilizable at v ~ 0
};

/// Rolls u = clamp(-K (x - x_ref)) toward `to`, certifying every step
/// against the collision chain (set membership and psi_r(u) >= 0) and the
/// visibility constraint. Returns the certified prefix on first failure.
TrajectorySegment lqr_cbf_steer(const State& from, const Eigen::Vector2d& to,
                                const SafetyContext& ctx, const SteerParams& params);

}  // namespace vrrt
