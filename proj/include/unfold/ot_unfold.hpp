#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "unfold/klproj.hpp"
#include "unfold/measures.hpp"
#include "unfold/trace.hpp"

namespace unfold {

// Raised when an update leaves the representable range; carries the block
// name and the dynamic range that caused it.
class SolverAbort : public std::runtime_error {
 public:
  explicit SolverAbort(const std::string& what) : std::runtime_error(what) {}
};

// The (m+L) x (n+1) block problem of the generalized Sinkhorn scheme:
//   log K~ = [ -C/eps   -inf ]
//            [  -inf      0  ]
// with second marginal b = [nu; 1] and first marginal constrained to
// ker B, B = [Id_m, -R]. The -inf blocks are handled structurally; they
// are never represented by large finite numbers.
struct BlockSystem {
  int m = 0, L = 0, n = 0;
  Eigen::MatrixXd cost;       // m x n
  Eigen::MatrixXd log_gibbs;  // -cost/epsilon
  Eigen::VectorXd b;          // [nu; 1], length n+1
  ConstraintOperator constraint;
  double epsilon = 0.0;

  double log_ktilde(int r, int s) const;
  Eigen::MatrixXd log_ktilde_matrix() const;
};

// Scaling variables in log coordinates; u = e^{f/eps}, v = e^{g/eps} for
// the Lagrange potentials f, g.
struct ScalingState {
  Eigen::VectorXd log_u;  // length m+L
  Eigen::VectorXd log_v;  // length n+1
};

struct DrParams {
  double tau = 1e-3;
  int iters = 25;
};

struct StepReport {
  double ker_residual = 0.0;              // ||B(u .* K~v)||inf after the u-update
  double second_marginal_residual = 0.0;  // column-sum defect after the v-update
};

struct SigmaExtract {
  Eigen::VectorXd sigma;  // renormalized to the simplex
  double normalization_defect = 0.0;
};

struct SolveConfig {
  double epsilon = 3e-5;
  double epsilon_init = 0.01;
  DrParams dr;
  int init_sinkhorn_iters = 100;
  double init_sinkhorn_tol = 0.0;
  int outer_iters = 200;
  Eigen::VectorXd sigma0;  // empty -> uniform 1/L
  bool early_stop = false;
  double early_stop_tol = 1e-9;
};

struct SolveResult {
  Eigen::VectorXd sigma;
  IterationTrace trace;
};

BlockSystem assemble(const UnfoldingProblem& problem, double epsilon);

// State with the given log_u and log_v set by the v-update.
ScalingState make_state(const BlockSystem& sys, const Eigen::VectorXd& log_u);

// u^0 = [c; sigma0] with c the first scaling of classical Sinkhorn between
// R sigma0 and nu at epsilon_init; v^0 via the v-update.
ScalingState initialize(const BlockSystem& sys, const Eigen::VectorXd& sigma0,
                        double epsilon_init, int sinkhorn_iters,
                        double sinkhorn_tol = 0.0);

// One u-update (KL projection of the first marginal onto ker B via DR,
// then quotient by K~v); returns the ker residual.
double u_update(const BlockSystem& sys, ScalingState& state, const DrParams& dr);

// v = b / (K~^T u); returns the recomputed column-sum defect.
double v_update(const BlockSystem& sys, ScalingState& state);

StepReport outer_step(const BlockSystem& sys, ScalingState& state, const DrParams& dr);

// sigma_k = u_{m+k} v_{n+1}
SigmaExtract extract_sigma(const BlockSystem& sys, const ScalingState& state);

// diag(u) K~ diag(v), materialized (tests and small problems only)
Eigen::MatrixXd plan_matrix(const BlockSystem& sys, const ScalingState& state);

// Full pipeline: assemble, initialize, outer_iters outer steps, tracing
// sigma and W_p^p(nu_sigma, nu) each iteration. An empty evaluator selects
// the exact Wasserstein backend from the eval module.
SolveResult solve(const UnfoldingProblem& problem, const SolveConfig& cfg,
                  const SigmaEvaluator& evaluator = {});

}  // namespace unfold
