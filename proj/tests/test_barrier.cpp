#include <doctest.h>

#include <random>

#include "vrrt/barrier.hpp"

using namespace vrrt;

namespace {

// Double-integrator test system: state (x, v), xdot = v, vdot = u.
class DoubleIntegrator final : public ControlAffineSystem {
 public:
  int state_dim() const override { return 2; }
  int input_dim() const override { return 1; }
  Eigen::VectorXd drift(const Eigen::VectorXd& x) const override {
    Eigen::VectorXd f(2);
    f << x[1], 0.0;
    return f;
  }
  Eigen::MatrixXd actuation(const Eigen::VectorXd& x) const override {
    (void)x;
    Eigen::MatrixXd g(2, 1);
    g << 0.0, 1.0;
    return g;
  }
  Eigen::MatrixXd drift_jacobian(const Eigen::VectorXd& x) const override {
    (void)x;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 2);
    J(0, 1) = 1.0;
    return J;
  }
};

// Single integrator: state (x), xdot = u.
class SingleIntegrator final : public ControlAffineSystem {
 public:
  int state_dim() const override { return 1; }
  int input_dim() const override { return 1; }
  Eigen::VectorXd drift(const Eigen::VectorXd& x) const override {
    (void)x;
    return Eigen::VectorXd::Zero(1);
  }
  Eigen::MatrixXd actuation(const Eigen::VectorXd& x) const override {
    (void)x;
    return Eigen::MatrixXd::Ones(1, 1);
  }
  Eigen::MatrixXd drift_jacobian(const Eigen::VectorXd& x) const override {
    (void)x;
    return Eigen::MatrixXd::Zero(1, 1);
  }
};

BarrierSpec position_barrier_2d(double gamma1, double gamma2) {
  // h = x on the double integrator (first state component)
  Eigen::VectorXd a(2);
  a << 1.0, 0.0;
  return make_barrier(std::make_shared<LinearField>(a, 0.0), 2,
                      {ClassK{gamma1}, ClassK{gamma2}});
}

Eigen::VectorXd vec2(double x, double v) {
  Eigen::VectorXd out(2);
  out << x, v;
  return out;
}

Eigen::VectorXd vec1(double u) {
  Eigen::VectorXd out(1);
  out << u;
  return out;
}

}  // namespace

// Hand expansion for h = x on (xdot = v, vdot = u) with identity alphas:
//   psi_0 = x, psi_1 = v + x, psi_2(u) = u + 2v + x.
TEST_CASE("psi series: double integrator, h = x, identity alphas") {
  const DoubleIntegrator sys;
  const BarrierSpec spec = position_barrier_2d(1.0, 1.0);

  SUBCASE("at (x=1, v=0)") {
    const PsiSeries s = eval_psi_series(spec, sys, vec2(1.0, 0.0));
    REQUIRE(s.psi.size() == 2);
    CHECK(s.psi[0] == doctest::Approx(1.0));
    CHECK(s.psi[1] == doctest::Approx(1.0));
    CHECK(s.c0 == doctest::Approx(1.0));
    CHECK(s.c[0] == doctest::Approx(1.0));
  }
  SUBCASE("at (x=0, v=1)") {
    const PsiSeries s = eval_psi_series(spec, sys, vec2(0.0, 1.0));
    CHECK(s.psi[0] == doctest::Approx(0.0));
    CHECK(s.psi[1] == doctest::Approx(1.0));
    CHECK(s.c0 == doctest::Approx(2.0));
    CHECK(s.c[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("psi series: r = 1 reduces to L_f h + L_g h u + alpha(h)") {
  const SingleIntegrator sys;
  Eigen::VectorXd a(1);
  a << 1.0;
  const BarrierSpec spec =
      make_barrier(std::make_shared<LinearField>(a, 0.0), 1, {ClassK{1.0}});
  const PsiSeries s = eval_psi_series(spec, sys, vec1(1.0));
  CHECK(s.psi[0] == doctest::Approx(1.0));
  CHECK(s.c0 == doctest::Approx(1.0));  // psi_1(u) = u + 1
  CHECK(s.c[0] == doctest::Approx(1.0));
}

TEST_CASE("psi series: constant barrier stays constant along the chain") {
  const DoubleIntegrator sys;
  for (int r : {1, 2}) {
    std::vector<ClassK> alphas(r, ClassK{1.0});
    const BarrierSpec spec = make_barrier(
        std::make_shared<LinearField>(Eigen::VectorXd::Zero(2), 5.0), r, alphas);
    const PsiSeries s = eval_psi_series(spec, sys, vec2(0.3, -0.7));
    for (double p : s.psi) CHECK(p == doctest::Approx(5.0));
    CHECK(s.c0 == doctest::Approx(5.0));
    CHECK(s.c.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
}

TEST_CASE("admissible: boundary of the affine form") {
  const DoubleIntegrator sys;
  const BarrierSpec spec = position_barrier_2d(1.0, 1.0);
  // at (x=1, v=0): psi_2(u) = u + 1
  CHECK(admissible(spec, sys, vec2(1.0, 0.0), vec1(-1.0)));        // psi_2 = 0
  CHECK_FALSE(admissible(spec, sys, vec2(1.0, 0.0), vec1(-2.0)));  // psi_2 = -1
  // constant barrier admits everything
  const BarrierSpec constant =
      make_barrier(std::make_shared<LinearField>(Eigen::VectorXd::Zero(2), 5.0), 2,
                   {ClassK{1.0}, ClassK{1.0}});
  CHECK(admissible(constant, sys, vec2(0.0, 0.0), vec1(-100.0)));
}

TEST_CASE("in_set_intersection") {
  const DoubleIntegrator sys;
  const BarrierSpec spec = position_barrier_2d(1.0, 1.0);
  CHECK(in_set_intersection(spec, sys, vec2(1.0, 0.0)));         // psi = (1, 1)
  CHECK_FALSE(in_set_intersection(spec, sys, vec2(1.0, -2.0)));  // psi_1 = -1
  CHECK(in_set_intersection(spec, sys, vec2(0.0, 0.0)));  // both exactly 0 (closed sets)
}

TEST_CASE("mis-declared relative degree is detected") {
  const DoubleIntegrator sys;
  // h = v has relative degree 1 (L_g h = 1); declaring 2 must throw
  Eigen::VectorXd a(2);
  a << 0.0, 1.0;
  const BarrierSpec wrong = make_barrier(std::make_shared<LinearField>(a, 0.0), 2,
                                         {ClassK{1.0}, ClassK{1.0}});
  CHECK_THROWS_AS(eval_psi_series(wrong, sys, vec2(0.0, 0.0)), ChainDegreeError);
  // declared as degree 1 it evaluates fine
  const BarrierSpec right =
      make_barrier(std::make_shared<LinearField>(a, 0.0), 1, {ClassK{1.0}});
  CHECK_NOTHROW(eval_psi_series(right, sys, vec2(0.0, 0.0)));
}

TEST_CASE("barrier construction rejects bad arguments") {
  Eigen::VectorXd a(2);
  a << 1.0, 0.0;
  auto field = std::make_shared<LinearField>(a, 0.0);
  CHECK_THROWS_AS(make_barrier(field, 3, {ClassK{1}, ClassK{1}, ClassK{1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_barrier(field, 2, {ClassK{1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_barrier(field, 1, {ClassK{0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_barrier(nullptr, 1, {ClassK{1}}), std::invalid_argument);
}

// Finite-difference check of psidot_i along a fixed admissible input:
// (psi_i(x(t+d)) - psi_i(x(t))) / d should match L_f psi_i + L_g psi_i u.
TEST_CASE("psi derivatives match finite differences (randomized)") {
  const DoubleIntegrator sys;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double delta = 1e-5;

  for (int trial = 0; trial < 1000; ++trial) {
    const double g1 = 0.2 + 2.0 * u01(rng);
    const double g2 = 0.2 + 2.0 * u01(rng);
    const BarrierSpec spec = position_barrier_2d(g1, g2);
    const Eigen::VectorXd x = vec2(u01(rng) * 4 - 2, u01(rng) * 4 - 2);
    const Eigen::VectorXd u = vec1(u01(rng) * 2 - 1);

    const PsiSeries at_x = eval_psi_series(spec, sys, x);
    // central difference along the exact double-integrator flow under u
    auto flow = [&](double d) {
      return vec2(x[0] + x[1] * d + 0.5 * u[0] * d * d, x[1] + u[0] * d);
    };
    const PsiSeries fwd = eval_psi_series(spec, sys, flow(delta));
    const PsiSeries bwd = eval_psi_series(spec, sys, flow(-delta));

    // psidot_1 (the last level without its alpha term): c0 + c u - alpha_2(psi_1)
    const double analytic = at_x.c0 + at_x.c.dot(u) - g2 * at_x.psi[1];
    const double fd = (fwd.psi[1] - bwd.psi[1]) / (2 * delta);
    const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-6});
    CHECK(std::abs(analytic - fd) / scale < 1e-3);

    // psidot_0 = psi_1 - alpha_1(psi_0)
    const double analytic0 = at_x.psi[1] - g1 * at_x.psi[0];
    const double fd0 = (fwd.psi[0] - bwd.psi[0]) / (2 * delta);
    const double scale0 = std::max({std::abs(analytic0), std::abs(fd0), 1e-6});
    CHECK(std::abs(analytic0 - fd0) / scale0 < 1e-3);
  }
}

// Theorems 1-2, empirically: from inside C_1 cap C_2, any admissible input
// keeps h nonnegative. Exercised with the max-margin policy.
TEST_CASE("forward invariance under max-margin admissible inputs") {
  const DoubleIntegrator sys;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u_max = 1.0;
  const double dt = 0.01;

  int done = 0;
  while (done < 50) {
    const BarrierSpec spec = position_barrier_2d(1.0, 1.0);
    // v floor keeps psi_2(u_max) >= 0 reachable: with |u| <= 1 the barrier
    // is only valid where some admissible input exists
    Eigen::VectorXd x = vec2(u01(rng) * 3, u01(rng) * 2.5 - 0.5);
    if (!in_set_intersection(spec, sys, x)) continue;  // rejection-sample a valid start
    ++done;
    for (double t = 0.0; t < 10.0; t += dt) {
      const PsiSeries s = eval_psi_series(spec, sys, x);
      // max-margin input: c > 0 here, so u = +u_max maximizes psi_2
      const double u = s.c[0] > 0 ? u_max : -u_max;
      REQUIRE(s.last(vec1(u)) >= -1e-9);
      x = vec2(x[0] + x[1] * dt + 0.5 * u * dt * dt, x[1] + u * dt);
      CHECK(spec.h->value(x) >= -1e-6);
    }
  }
}
