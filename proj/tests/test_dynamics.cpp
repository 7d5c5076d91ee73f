#include <doctest.h>

#include <cmath>
#include <random>

#include "vrrt/dynamics.hpp"

using namespace vrrt;

namespace {
Limits wide_limits() {
  Limits lim;
  lim.v_min = -100.0;
  lim.v_max = 100.0;
  lim.a_min = -100.0;
  lim.a_max = 100.0;
  lim.omega_min = -100.0;
  lim.omega_max = 100.0;
  return lim;
}
}  // namespace

TEST_CASE("affine fields") {
  const AffineFields f1 = affine_fields(State{0, 0, 0, 1});
  CHECK(f1.f.isApprox(Eigen::Vector4d{1, 0, 0, 0}));
  const AffineFields f2 = affine_fields(State{0, 0, M_PI / 2, 2});
  CHECK(f2.f.isApprox(Eigen::Vector4d{0, 2, 0, 0}, 1e-12));

  // xdot = f(s) exactly when u = 0
  const AffineFields f3 = affine_fields(State{1, 2, 0.7, 0.5});
  const Eigen::Vector4d xdot = f3.f + f3.g * Eigen::Vector2d{0, 0};
  CHECK(xdot.isApprox(f3.f));
  // g routes omega to thetadot and a to vdot
  const Eigen::Vector4d gu = f3.g * Eigen::Vector2d{2.0, 3.0};
  CHECK(gu[2] == 3.0);
  CHECK(gu[3] == 2.0);
}

TEST_CASE("step: straight line with zero input") {
  const Limits lim = wide_limits();
  const State s1 = step(State{0, 0, 0, 1}, Control{0, 0}, 0.1, lim);
  CHECK(s1.x == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s1.y == doctest::Approx(0.0));
  CHECK(s1.v == doctest::Approx(1.0));
}

TEST_CASE("step: constant acceleration from rest matches x = a t^2 / 2") {
  const Limits lim = wide_limits();
  const State s1 = step(State{0, 0, 0, 0}, Control{1, 0}, 0.1, lim);
  CHECK(s1.x == doctest::Approx(0.005).epsilon(1e-10));  // RK4 exact on polynomials
  CHECK(s1.v == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("step: full circle returns to start") {
  const Limits lim = wide_limits();
  State s{0, 0, 0, 1};
  const int n = 1000;
  for (int i = 0; i < n; ++i) s = step(s, Control{0, 2 * M_PI}, 1.0 / n, lim);
  CHECK(std::abs(s.x) < 1e-4);
  CHECK(std::abs(s.y) < 1e-4);
  CHECK(std::abs(s.theta) < 1e-4);  // wrapped back to ~0
  CHECK(s.v == doctest::Approx(1.0));
}

TEST_CASE("step preserves v under zero input for any heading") {
  const Limits lim = wide_limits();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const State s = step(State{0, 0, ang(rng), 0.37}, Control{0, 0}, 0.05, lim);
    CHECK(s.v == 0.37);
  }
}

TEST_CASE("step clamps v into its range") {
  Limits lim;
  lim.v_min = 0.0;
  lim.v_max = 1.0;
  const State hi = step(State{0, 0, 0, 0.99}, Control{1, 0}, 0.5, lim);
  CHECK(hi.v == 1.0);
  const State lo = step(State{0, 0, 0, 0.01}, Control{-1, 0}, 0.5, lim);
  CHECK(lo.v == 0.0);
}

TEST_CASE("clamp_control flags saturation") {
  Limits lim;
  bool clamped = false;
  const Control c = clamp_control(Control{2.0, -0.5}, lim, &clamped);
  CHECK(clamped);
  CHECK(c.a == 1.0);
  CHECK(c.omega == -0.5);
  clamp_control(Control{0.5, 0.5}, lim, &clamped);
  CHECK_FALSE(clamped);
}

TEST_CASE("RK4 order check on the circle") {
  const Limits lim = wide_limits();
  const double v = 1.0, omega = 1.0, T = 1.0;
  auto endpoint_error = [&](int n) {
    State s{0, 0, 0, v};
    for (int i = 0; i < n; ++i) s = step(s, Control{0, omega}, T / n, lim);
    const double R = v / omega;
    const Eigen::Vector2d exact{R * std::sin(omega * T), R * (1 - std::cos(omega * T))};
    return (s.position() - exact).norm();
  };
  const double e1 = endpoint_error(8);
  const double e2 = endpoint_error(16);
  CHECK(e2 < e1 / 8.0);  // 4th order: expect ~1/16
}

TEST_CASE("analytic Jacobian matches finite differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double h = 1e-6;
  for (int trial = 0; trial < 1000; ++trial) {
    const State s{u01(rng) * 10 - 5, u01(rng) * 10 - 5, (u01(rng) * 2 - 1) * M_PI,
                  u01(rng) * 2};
    const Eigen::Matrix4d A = drift_jacobian(s);
    for (int j = 0; j < 4; ++j) {
      Eigen::Vector4d lo = s.vec(), hi = s.vec();
      lo[j] -= h;
      hi[j] += h;
      const Eigen::Vector4d flo = affine_fields(State::from_vec(lo)).f;
      const Eigen::Vector4d fhi = affine_fields(State::from_vec(hi)).f;
      const Eigen::Vector4d fd = (fhi - flo) / (2 * h);
      for (int i = 0; i < 4; ++i) {
        const double scale = std::max({std::abs(A(i, j)), std::abs(fd[i]), 1e-3});
        CHECK(std::abs(A(i, j) - fd[i]) / scale < 1e-5);
      }
    }
  }
}

TEST_CASE("linearize discretizes as I + A dt, B dt") {
  const State s{1, 2, 0.3, 0.8};
  const double dt = 0.05;
  const Linearization lin = linearize(s, dt);
  CHECK(lin.A.isApprox(Eigen::Matrix4d::Identity() + drift_jacobian(s) * dt));
  CHECK(lin.B.isApprox(affine_fields(s).g * dt));
  // B rows for (thetadot, vdot) are the constant [[0,1],[1,0]] blocks
  CHECK(lin.B(2, 1) == dt);
  CHECK(lin.B(3, 0) == dt);
  CHECK(lin.B(0, 0) == 0.0);

  // well-defined at v = 0
  const Linearization at_rest = linearize(State{0, 0, 0.5, 0}, dt);
  CHECK(at_rest.A.allFinite());
}

TEST_CASE("wrap_angle maps to (-pi, pi]") {
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(2 * M_PI) == doctest::Approx(0.0));
  CHECK(wrap_angle(-0.1) == doctest::Approx(-0.1));
}
