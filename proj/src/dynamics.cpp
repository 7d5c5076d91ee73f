#include "vrrt/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace vrrt {

double wrap_angle(double theta) {
  double w = std::remainder(theta, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

AffineFields affine_fields(const State& s) {
  AffineFields out;
  out.f = {s.v * std::cos(s.theta), s.v * std::sin(s.theta), 0.0, 0.0};
  out.g.setZero();
  out.g(2, 1) = 1.0;  // thetadot = omega
  out.g(3, 0) = 1.0;  // vdot = a
  return out;
}

Control clamp_control(const Control& u, const Limits& lim, bool* clamped) {
  Control c{std::clamp(u.a, lim.a_min, lim.a_max),
            std::clamp(u.omega, lim.omega_min, lim.omega_max)};
  if (clamped) *clamped = (c.a != u.a) || (c.omega != u.omega);
  return c;
}

namespace {

Eigen::Vector4d xdot(const Eigen::Vector4d& s, const Control& u) {
  return {s[3] * std::cos(s[2]), s[3] * std::sin(s[2]), u.omega, u.a};
}

}  // namespace

State step(const State& s, const Control& u_in, double dt, const Limits& lim) {
  const Control u = clamp_control(u_in, lim);
  const Eigen::Vector4d x0 = s.vec();
  const Eigen::Vector4d k1 = xdot(x0, u);
  const Eigen::Vector4d k2 = xdot(x0 + 0.5 * dt * k1, u);
  const Eigen::Vector4d k3 = xdot(x0 + 0.5 * dt * k2, u);
  const Eigen::Vector4d k4 = xdot(x0 + dt * k3, u);
  Eigen::Vector4d x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  x1[2] = wrap_angle(x1[2]);
  x1[3] = std::clamp(x1[3], lim.v_min, lim.v_max);
  return State::from_vec(x1);
}

Eigen::Matrix4d drift_jacobian(const State& s) {
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  A(0, 2) = -s.v * std::sin(s.theta);
  A(0, 3) = std::cos(s.theta);
  A(1, 2) = s.v * std::cos(s.theta);
  A(1, 3) = std::sin(s.theta);
  return A;
}

Linearization linearize(const State& s, double dt) {
  Linearization lin;
  lin.A = Eigen::Matrix4d::Identity() + drift_jacobian(s) * dt;
  lin.B = affine_fields(s).g * dt;
  return lin;
}

}  // namespace vrrt
