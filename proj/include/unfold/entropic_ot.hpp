#pragma once

#include <Eigen/Dense>

namespace unfold {

// Result of log-domain Sinkhorn between two fixed marginals. The plan is
// gamma_ij = c_i exp(-C_ij/eps) d_j, kept as log-scalings throughout.
struct SinkhornPlan {
  Eigen::VectorXd log_c;      // length m
  Eigen::VectorXd log_d;      // length n
  Eigen::MatrixXd gibbs_log;  // -C/epsilon
  double epsilon = 0.0;
  Eigen::VectorXd mu, nu;          // prescribed marginals
  double marginal_residual = 0.0;  // linf defect of the second marginal
  int iters_run = 0;

  Eigen::MatrixXd plan() const;  // exp(log_c_i + gibbs_log_ij + log_d_j)
};

// Alternating log-domain updates, ending on the c-update so the first
// marginal is exact and the second-marginal residual is the reported one.
// residual_tol > 0 enables early exit.
SinkhornPlan sinkhorn(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                      const Eigen::MatrixXd& cost, double epsilon, int iters,
                      double residual_tol = 0.0);

// <gamma, C> + eps KL(gamma | mu (x) nu)
double entropic_cost(const SinkhornPlan& plan, const Eigen::MatrixXd& cost);

}  // namespace unfold
