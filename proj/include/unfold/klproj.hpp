#pragma once

#include <Eigen/Dense>

namespace unfold {

// Principal-branch Lambert W on [0, inf): w with w e^w = x.
double lambert_w(double x);

// W(e^t) for arbitrary real t, evaluated without forming e^t. This is the
// form the Douglas-Rachford proximal step needs once its argument is kept
// in logarithms.
double lambert_w_exp(double t);

// B = [Id_m, -R] for a column-stochastic m x L kernel R, together with the
// dense orthogonal projector onto ker B, materialized once from the QR
// factorization of B^T.
class ConstraintOperator {
 public:
  explicit ConstraintOperator(Eigen::MatrixXd R);

  int m() const { return static_cast<int>(R_.rows()); }
  int L() const { return static_cast<int>(R_.cols()); }
  int size() const { return m() + L(); }

  const Eigen::MatrixXd& R() const { return R_; }
  const Eigen::MatrixXd& orth_projector() const { return proj_; }
  Eigen::MatrixXd B() const;  // materialized [Id_m, -R]

  // B x = x_head - R x_tail
  Eigen::VectorXd apply_B(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd R_;
  Eigen::MatrixXd proj_;  // (m+L) x (m+L)
};

// y = (Id - B^T (B B^T)^-1 B) x
Eigen::VectorXd orth_project(const ConstraintOperator& op, const Eigen::VectorXd& x);

struct KlProjection {
  Eigen::VectorXd value;      // elementwise positive (floored at 1e-300)
  double ker_residual = 0.0;  // ||B value||inf
};

// Approximates argmin_{x in ker B} KL(x | w) by Douglas-Rachford splitting:
//   y = P_ker x,  z = tau W((w/tau) e^{(2y - x)/tau}),  x += z - y,
// initialized at x = w; returns the last z. Strict positivity of w is
// required, zeros are rejected rather than clamped.
KlProjection kl_project_ker(const ConstraintOperator& op, const Eigen::VectorXd& w,
                            double tau, int iters);

}  // namespace unfold
