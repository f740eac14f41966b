#include "unfold/entropic_ot.hpp"

#include <cmath>
#include <stdexcept>

#include "unfold/logsum.hpp"

namespace unfold {

Eigen::MatrixXd SinkhornPlan::plan() const {
  Eigen::MatrixXd out(gibbs_log.rows(), gibbs_log.cols());
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) {
      out(i, j) = std::exp(log_c[i] + gibbs_log(i, j) + log_d[j]);
    }
  }
  return out;
}

SinkhornPlan sinkhorn(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                      const Eigen::MatrixXd& cost, double epsilon, int iters,
                      double residual_tol) {
  if (epsilon <= 0.0) throw std::invalid_argument("sinkhorn: epsilon must be positive");
  if (iters < 1) throw std::invalid_argument("sinkhorn: iters must be >= 1");
  if (!cost.allFinite()) throw std::invalid_argument("sinkhorn: cost contains NaN/Inf");
  if (cost.rows() != mu.size() || cost.cols() != nu.size()) {
    throw std::invalid_argument("sinkhorn: cost dimensions mismatch marginals");
  }
  if ((mu.array() <= 0.0).any() || (nu.array() <= 0.0).any()) {
    throw std::invalid_argument("sinkhorn: marginals must be strictly positive");
  }

  SinkhornPlan plan;
  plan.gibbs_log = -cost / epsilon;
  plan.epsilon = epsilon;
  plan.mu = mu;
  plan.nu = nu;
  plan.log_c = Eigen::VectorXd::Zero(mu.size());
  plan.log_d = Eigen::VectorXd::Zero(nu.size());

  const Eigen::VectorXd log_mu = mu.array().log();
  const Eigen::VectorXd log_nu = nu.array().log();

  for (int it = 0; it < iters; ++it) {
    plan.log_d = log_nu - lse_cols(plan.gibbs_log, plan.log_c);
    plan.log_c = log_mu - lse_rows(plan.gibbs_log, plan.log_d);
    const Eigen::VectorXd col = plan.log_d + lse_cols(plan.gibbs_log, plan.log_c);
    plan.marginal_residual = (col.array().exp() - nu.array()).abs().maxCoeff();
    plan.iters_run = it + 1;
    if (residual_tol > 0.0 && plan.marginal_residual < residual_tol) break;
  }
  return plan;
}

double entropic_cost(const SinkhornPlan& plan, const Eigen::MatrixXd& cost) {
  double linear = 0.0;
  double kl = 0.0;
  for (int i = 0; i < cost.rows(); ++i) {
    for (int j = 0; j < cost.cols(); ++j) {
      const double lg = plan.log_c[i] + plan.gibbs_log(i, j) + plan.log_d[j];
      const double g = std::exp(lg);
      const double ref = plan.mu[i] * plan.nu[j];
      linear += g * cost(i, j);
      if (g > 0.0) kl += g * (lg - std::log(ref)) - g + ref;
      else kl += ref;
    }
  }
  return linear + plan.epsilon * kl;
}

}  // namespace unfold
