#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "vrrt/dynamics.hpp"

namespace vrrt {

/// Thrown by eval_psi_series when the input shows up earlier in the chain
/// than the declared relative degree allows.
struct ChainDegreeError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Linear class-K function alpha(s) = gain * s, gain > 0.
struct ClassK {
  double gain = 1.0;
  double operator()(double s) const { return gain * s; }
};

/// Control-affine system xdot = f(x) + g(x) u, dimension-generic so the
/// barrier machinery can be exercised on test systems.
class ControlAffineSystem {
 public:
  virtual ~ControlAffineSystem() = default;
  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual Eigen::VectorXd drift(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd actuation(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd drift_jacobian(const Eigen::VectorXd& x) const = 0;
};

/// The planar unicycle of dynamics.hpp behind the generic interface.
class UnicycleSystem final : public ControlAffineSystem {
 public:
  int state_dim() const override { return 4; }
  int input_dim() const override { return 2; }
  Eigen::VectorXd drift(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd actuation(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd drift_jacobian(const Eigen::VectorXd& x) const override;
};

/// Scalar function of the state with hand-coded first and second
/// derivatives. The 2-jet is exactly what a relative-degree-2 chain needs.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const = 0;
};

/// h(x) = x^T Q x + b^T x + c.
class QuadraticField final : public ScalarField {
 public:
  QuadraticField(Eigen::MatrixXd Q, Eigen::VectorXd b, double c)
      : Q_(std::move(Q)), b_(std::move(b)), c_(c) {}
  double value(const Eigen::VectorXd& x) const override {
    return x.dot(Q_ * x) + b_.dot(x) + c_;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return 2.0 * Q_ * x + b_;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    (void)x;
    return 2.0 * Q_;
  }

 private:
  Eigen::MatrixXd Q_;
  Eigen::VectorXd b_;
  double c_;
};

/// h(x) = a^T x + c (covers constant barriers with a = 0).
class LinearField final : public ScalarField {
 public:
  LinearField(Eigen::VectorXd a, double c) : a_(std::move(a)), c_(c) {}
  double value(const Eigen::VectorXd& x) const override { return a_.dot(x) + c_; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    (void)x;
    return a_;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    (void)x;
    return Eigen::MatrixXd::Zero(a_.size(), a_.size());
  }

 private:
  Eigen::VectorXd a_;
  double c_;
};

/// A barrier h with its class-K chain. relative_degree is 1 or 2; the
/// hand-coded 2-jet does not reach further and nothing in this project
/// needs a deeper chain.
struct BarrierSpec {
  std::shared_ptr<const ScalarField> h;
  int relative_degree = 1;
  std::vector<ClassK> alphas;
};

BarrierSpec make_barrier(std::shared_ptr<const ScalarField> h, int relative_degree,
                         std::vector<ClassK> alphas);

/// psi_0 .. psi_{r-1} evaluated at a state, plus the last level as an
/// affine form psi_r(u) = c0 + c . u.
struct PsiSeries {
  std::vector<double> psi;
  double c0 = 0.0;
  Eigen::RowVectorXd c;

  double last(const Eigen::VectorXd& u) const { return c0 + c.dot(u); }
};

inline constexpr double kPsiTol = 1e-9;

/// Evaluates the chain psi_i = psidot_{i-1} + alpha_i(psi_{i-1}).
/// Throws ChainDegreeError if L_g psi_i is nonzero (beyond 1e-9) for
/// i < r-1, i.e. the declared relative degree is too high.
PsiSeries eval_psi_series(const BarrierSpec& spec, const ControlAffineSystem& sys,
                          const Eigen::VectorXd& x);

/// Theorem-2 membership test: u is admissible iff psi_r(u) >= -tol.
bool admissible(const BarrierSpec& spec, const ControlAffineSystem& sys,
                const Eigen::VectorXd& x, const Eigen::VectorXd& u);

/// True iff psi_i(x) >= -tol for every i = 0..r-1 (the set intersection
/// C_1 cap ... cap C_r; sets are closed, the boundary is inside).
bool in_set_intersection(const BarrierSpec& spec, const ControlAffineSystem& sys,
                         const Eigen::VectorXd& x);

}  // namespace vrrt
