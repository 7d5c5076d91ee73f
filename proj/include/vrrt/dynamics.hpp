#pragma once

#include <Eigen/Dense>

namespace vrrt {

/// Robot state: planar pose plus longitudinal speed.
/// theta is kept wrapped to (-pi, pi].
struct State {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
  Eigen::Vector4d vec() const { return {x, y, theta, v}; }
  static State from_vec(const Eigen::Vector4d& s) { return {s[0], s[1], s[2], s[3]}; }
};

/// Input: longitudinal acceleration and turn rate.
struct Control {
  double a = 0.0;
  double omega = 0.0;

  Eigen::Vector2d vec() const { return {a, omega}; }
};

/// Box input set U and speed range, all config-overridable.
struct Limits {
  double v_min = 0.0;
  double v_max = 1.0;
  double a_min = -1.0;
  double a_max = 1.0;
  double omega_min = -1.0;
  double omega_max = 1.0;
  double dt = 0.05;
};

/// Drift f(x) and actuation g(x) of the control-affine model
/// xdot = f(x) + g(x) u with x = (x, y, theta, v), u = (a, omega):
///   xdot = v cos(theta), ydot = v sin(theta), thetadot = omega, vdot = a.
struct AffineFields {
  Eigen::Vector4d f;
  Eigen::Matrix<double, 4, 2> g;
};

double wrap_angle(double theta);

AffineFields affine_fields(const State& s);

/// Clamp u into the box U; sets *clamped when the input had to change.
Control clamp_control(const Control& u, const Limits& lim, bool* clamped = nullptr);

/// One fixed RK4 step of the clamped input; theta re-wrapped and v clamped
/// to [v_min, v_max] afterwards.
State step(const State& s, const Control& u, double dt, const Limits& lim);

/// Continuous-time Jacobian of f + g u w.r.t. the state (g is constant, so
/// this does not depend on u).
Eigen::Matrix4d drift_jacobian(const State& s);

/// Euler-discretized linearization: A_d = I + A dt, B_d = B dt.
struct Linearization {
  Eigen::Matrix4d A;
  Eigen::Matrix<double, 4, 2> B;
};
Linearization linearize(const State& s, double dt);

}  // namespace vrrt
