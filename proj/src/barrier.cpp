#include "vrrt/barrier.hpp"

#include <sstream>

namespace vrrt {

Eigen::VectorXd UnicycleSystem::drift(const Eigen::VectorXd& x) const {
  return affine_fields(State::from_vec(x)).f;
}

Eigen::MatrixXd UnicycleSystem::actuation(const Eigen::VectorXd& x) const {
  return affine_fields(State::from_vec(x)).g;
}

Eigen::MatrixXd UnicycleSystem::drift_jacobian(const Eigen::VectorXd& x) const {
  return vrrt::drift_jacobian(State::from_vec(x));
}

BarrierSpec make_barrier(std::shared_ptr<const ScalarField> h, int relative_degree,
                         std::vector<ClassK> alphas) {
  if (!h) throw std::invalid_argument("barrier needs a field");
  if (relative_degree < 1 || relative_degree > 2)
    throw std::invalid_argument("relative degree must be 1 or 2 (2-jet chain)");
  if (static_cast<int>(alphas.size()) != relative_degree)
    throw std::invalid_argument("need one class-K function per chain level");
  for (const auto& a : alphas)
    if (a.gain <= 0.0) throw std::invalid_argument("class-K gain must be > 0");
  return BarrierSpec{std::move(h), relative_degree, std::move(alphas)};
}

namespace {

constexpr double kChainTol = 1e-9;

// Lie derivatives of h along the drift up to order r, and the input rows
// L_g L_f^k h for k = 0..r-1, from the 2-jet of h.
struct LieChain {
  std::vector<double> lf;                    // L_f^0 h .. L_f^r h
  std::vector<Eigen::RowVectorXd> lg_rows;   // L_g L_f^k h, k = 0..r-1
};

LieChain lie_chain(const ScalarField& h, const ControlAffineSystem& sys,
                   const Eigen::VectorXd& x, int r) {
  LieChain chain;
  const Eigen::VectorXd f = sys.drift(x);
  const Eigen::MatrixXd g = sys.actuation(x);
  const Eigen::VectorXd grad_h = h.gradient(x);

  chain.lf.push_back(h.value(x));
  chain.lg_rows.push_back(grad_h.transpose() * g);
  if (r >= 1) chain.lf.push_back(grad_h.dot(f));
  if (r >= 2) {
    // grad(L_f h) = H_h f + J_f^T grad h
    const Eigen::VectorXd grad_lfh =
        h.hessian(x) * f + sys.drift_jacobian(x).transpose() * grad_h;
    chain.lf.push_back(grad_lfh.dot(f));
    chain.lg_rows.push_back(grad_lfh.transpose() * g);
  }
  return chain;
}

}  // namespace

PsiSeries eval_psi_series(const BarrierSpec& spec, const ControlAffineSystem& sys,
                          const Eigen::VectorXd& x) {
  const int r = spec.relative_degree;
  const LieChain chain = lie_chain(*spec.h, sys, x, r);

  // The input must not reach the chain before the last level.
  for (int k = 0; k < r - 1; ++k) {
    if (chain.lg_rows[k].cwiseAbs().maxCoeff() > kChainTol) {
      std::ostringstream os;
      os << "mis-declared relative degree: L_g(L_f^" << k << " h) = "
         << chain.lg_rows[k] << " is nonzero before the last chain level";
      throw ChainDegreeError(os.str());
    }
  }

  // With linear alphas each u-independent level is a fixed combination of
  // drift Lie derivatives: psi_i = sum_k c_i[k] L_f^k h with
  // c_i[k] = c_{i-1}[k-1] + gain_i * c_{i-1}[k].
  PsiSeries out;
  std::vector<double> coeff{1.0};
  out.psi.push_back(chain.lf[0]);
  for (int i = 1; i < r; ++i) {
    std::vector<double> next(i + 1, 0.0);
    for (int k = 0; k <= i; ++k) {
      if (k >= 1) next[k] += coeff[k - 1];
      if (k < i) next[k] += spec.alphas[i - 1].gain * coeff[k];
    }
    coeff = std::move(next);
    double value = 0.0;
    for (int k = 0; k <= i; ++k) value += coeff[k] * chain.lf[k];
    out.psi.push_back(value);
  }

  // psi_r(u) = L_f psi_{r-1} + L_g psi_{r-1} u + alpha_r(psi_{r-1}).
  const double gain_r = spec.alphas[r - 1].gain;
  double c0 = 0.0;
  for (int k = 0; k < r; ++k) c0 += coeff[k] * (chain.lf[k + 1] + gain_r * chain.lf[k]);
  out.c0 = c0;
  out.c = chain.lg_rows[r - 1];  // top coefficient of the chain is always 1
  return out;
}

bool admissible(const BarrierSpec& spec, const ControlAffineSystem& sys,
                const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  return eval_psi_series(spec, sys, x).last(u) >= -kPsiTol;
}

bool in_set_intersection(const BarrierSpec& spec, const ControlAffineSystem& sys,
                         const Eigen::VectorXd& x) {
  const PsiSeries series = eval_psi_series(spec, sys, x);
  for (double v : series.psi)
    if (v < -kPsiTol) return false;
  return true;
}

}  // namespace vrrt
