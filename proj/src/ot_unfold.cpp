#include "unfold/ot_unfold.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "unfold/entropic_ot.hpp"
#include "unfold/eval.hpp"
#include "unfold/logsum.hpp"

namespace unfold {

namespace {

constexpr double kFloor = 1e-300;

// log((K~ v)_r): top rows reduce over the Gibbs block, bottom rows see only
// the exp(0) = 1 entry in the last column.
Eigen::VectorXd log_Kv(const BlockSystem& sys, const Eigen::VectorXd& log_v) {
  Eigen::VectorXd out(sys.m + sys.L);
  out.head(sys.m) = lse_rows(sys.log_gibbs, log_v.head(sys.n));
  out.tail(sys.L).setConstant(log_v[sys.n]);
  return out;
}

Eigen::VectorXd log_KTu(const BlockSystem& sys, const Eigen::VectorXd& log_u) {
  Eigen::VectorXd out(sys.n + 1);
  out.head(sys.n) = lse_cols(sys.log_gibbs, log_u.head(sys.m));
  out[sys.n] = logsumexp(log_u.tail(sys.L));
  return out;
}

void require_finite(const Eigen::VectorXd& v, const char* block) {
  if (!v.allFinite()) {
    std::ostringstream os;
    os << "scaling update overflowed in block '" << block
       << "' (log range [" << v.minCoeff() << ", " << v.maxCoeff()
       << "]); epsilon is likely too small for the cost scale";
    throw SolverAbort(os.str());
  }
}

}  // namespace

double BlockSystem::log_ktilde(int r, int s) const {
  if (r < m) return (s < n) ? log_gibbs(r, s) : kNegInf;
  return (s < n) ? kNegInf : 0.0;
}

Eigen::MatrixXd BlockSystem::log_ktilde_matrix() const {
  Eigen::MatrixXd out(m + L, n + 1);
  for (int r = 0; r < m + L; ++r)
    for (int s = 0; s < n + 1; ++s) out(r, s) = log_ktilde(r, s);
  return out;
}

BlockSystem assemble(const UnfoldingProblem& problem, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("assemble: epsilon must be positive");
  ValidationReport report = validate_problem(problem);
  if (!report.ok()) {
    throw std::invalid_argument("assemble: invalid problem: " + report.violations.front());
  }
  BlockSystem sys{static_cast<int>(problem.kernel.R.rows()),
                  static_cast<int>(problem.kernel.R.cols()),
                  problem.data.size(),
                  problem.cost,
                  -problem.cost / epsilon,
                  Eigen::VectorXd(problem.data.size() + 1),
                  ConstraintOperator(problem.kernel.R),
                  epsilon};
  sys.b.head(sys.n) = problem.data.weights;
  sys.b[sys.n] = 1.0;
  return sys;
}

ScalingState make_state(const BlockSystem& sys, const Eigen::VectorXd& log_u) {
  if (log_u.size() != sys.m + sys.L) throw std::invalid_argument("make_state: log_u length mismatch");
  ScalingState state{log_u, Eigen::VectorXd()};
  state.log_v = sys.b.array().log().matrix() - log_KTu(sys, state.log_u);
  require_finite(state.log_v, "v");
  return state;
}

ScalingState initialize(const BlockSystem& sys, const Eigen::VectorXd& sigma0,
                        double epsilon_init, int sinkhorn_iters, double sinkhorn_tol) {
  if (sigma0.size() != sys.L) throw std::invalid_argument("initialize: sigma0 length mismatch");
  if ((sigma0.array() <= 0.0).any()) {
    throw std::invalid_argument("initialize: sigma0 must be strictly positive");
  }
  Eigen::VectorXd log_u(sys.m + sys.L);
  if (sinkhorn_iters > 0) {
    const Eigen::VectorXd mu = sys.constraint.R() * sigma0;
    const Eigen::VectorXd nu = sys.b.head(sys.n);
    SinkhornPlan plan = sinkhorn(mu, nu, sys.cost, epsilon_init, sinkhorn_iters, sinkhorn_tol);
    log_u.head(sys.m) = plan.log_c;
  } else {
    log_u.head(sys.m).setZero();
  }
  log_u.tail(sys.L) = sigma0.array().log();
  require_finite(log_u, "u");
  return make_state(sys, log_u);
}

double u_update(const BlockSystem& sys, ScalingState& state, const DrParams& dr) {
  const Eigen::VectorXd lKv = log_Kv(sys, state.log_v);
  Eigen::VectorXd log_w = state.log_u + lKv;
  require_finite(log_w, "u .* K~v");
  const double shift = log_w.maxCoeff();
  const double tau_shifted = dr.tau * std::exp(-shift);
  if (!std::isfinite(tau_shifted) || tau_shifted <= 0.0) {
    std::ostringstream os;
    os << "u-update: first-marginal mass collapsed (max log " << shift
       << "), shifted DR step size is not representable";
    throw SolverAbort(os.str());
  }
  // The common shift of w and tau leaves the DR trajectory invariant, so
  // this is the plain iteration on u .* K~v run in a controlled range.
  const Eigen::VectorXd w = (log_w.array() - shift).exp().max(kFloor).matrix();
  KlProjection proj = kl_project_ker(sys.constraint, w, tau_shifted, dr.iters);
  state.log_u = (proj.value.array().log() + shift).matrix() - lKv;
  require_finite(state.log_u, "u");
  return proj.ker_residual * std::exp(shift);
}

double v_update(const BlockSystem& sys, ScalingState& state) {
  const Eigen::VectorXd lKTu = log_KTu(sys, state.log_u);
  state.log_v = sys.b.array().log().matrix() - lKTu;
  require_finite(state.log_v, "v");
  // recompute the column sums as a defect measurement
  const Eigen::VectorXd col = (log_KTu(sys, state.log_u) + state.log_v).array().exp();
  return (col - sys.b).cwiseAbs().maxCoeff();
}

StepReport outer_step(const BlockSystem& sys, ScalingState& state, const DrParams& dr) {
  StepReport report;
  report.ker_residual = u_update(sys, state, dr);
  report.second_marginal_residual = v_update(sys, state);
  return report;
}

SigmaExtract extract_sigma(const BlockSystem& sys, const ScalingState& state) {
  SigmaExtract out;
  out.sigma = (state.log_u.tail(sys.L).array() + state.log_v[sys.n]).exp();
  const double total = out.sigma.sum();
  out.normalization_defect = std::abs(total - 1.0);
  out.sigma /= total;
  return out;
}

Eigen::MatrixXd plan_matrix(const BlockSystem& sys, const ScalingState& state) {
  Eigen::MatrixXd out(sys.m + sys.L, sys.n + 1);
  for (int r = 0; r < sys.m + sys.L; ++r) {
    for (int s = 0; s < sys.n + 1; ++s) {
      const double lk = sys.log_ktilde(r, s);
      out(r, s) = (lk == kNegInf) ? 0.0 : std::exp(state.log_u[r] + lk + state.log_v[s]);
    }
  }
  return out;
}

SolveResult solve(const UnfoldingProblem& problem, const SolveConfig& cfg,
                  const SigmaEvaluator& evaluator) {
  BlockSystem sys = assemble(problem, cfg.epsilon);
  Eigen::VectorXd sigma0 = cfg.sigma0;
  if (sigma0.size() == 0) sigma0 = Eigen::VectorXd::Constant(sys.L, 1.0 / sys.L);

  SigmaEvaluator eval = evaluator;
  if (!eval) {
    eval = [&problem](const Eigen::VectorXd& sigma) {
      const DiscreteMeasure nus = push_forward(sigma, problem.kernel);
      if (problem.data.dim() == 1) return wasserstein_1d(nus, problem.data, problem.p);
      return wasserstein_exact(nus, problem.data, problem.p).first;
    };
  }

  ScalingState state = initialize(sys, sigma0, cfg.epsilon_init,
                                  cfg.init_sinkhorn_iters, cfg.init_sinkhorn_tol);
  SolveResult result;
  result.sigma = sigma0;
  Eigen::VectorXd prev = sigma0;
  for (int l = 0; l < cfg.outer_iters; ++l) {
    const auto t0 = std::chrono::steady_clock::now();
    StepReport report = outer_step(sys, state, cfg.dr);
    SigmaExtract ext = extract_sigma(sys, state);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    IterationRecord rec;
    rec.iter = l;
    rec.sigma = ext.sigma;
    rec.wpp = eval(ext.sigma);
    rec.second_marginal_residual = report.second_marginal_residual;
    rec.ker_residual = report.ker_residual;
    rec.elapsed_sec = elapsed;
    result.trace.push_back(std::move(rec));
    result.sigma = ext.sigma;

    const double change = (ext.sigma - prev).cwiseAbs().maxCoeff();
    prev = ext.sigma;
    if (cfg.early_stop && report.ker_residual < cfg.early_stop_tol &&
        change < cfg.early_stop_tol) {
      break;
    }
  }
  return result;
}

}  // namespace unfold
