#include "unfold/rl_unfold.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "unfold/eval.hpp"

namespace unfold {

namespace {

struct Grid {
  Eigen::VectorXd lo, width;  // per axis
  std::vector<int> bins;
  int cells = 1;

  int cell_of(const Eigen::RowVectorXd& x) const {
    int idx = 0;
    for (int t = 0; t < x.size(); ++t) {
      const double u = (x[t] - lo[t]) / width[t] * bins[t];
      int c = static_cast<int>(std::floor(u));
      if (c >= bins[t]) c = bins[t] - 1;  // closes the last cell
      if (c < 0) c = 0;
      idx = idx * bins[t] + c;
    }
    return idx;
  }

  Eigen::MatrixXd centers() const {
    const int d = static_cast<int>(bins.size());
    Eigen::MatrixXd out(cells, d);
    for (int c = 0; c < cells; ++c) {
      int rem = c;
      for (int t = d - 1; t >= 0; --t) {
        const int ct = rem % bins[t];
        rem /= bins[t];
        out(c, t) = lo[t] + (ct + 0.5) * width[t] / bins[t];
      }
    }
    return out;
  }
};

Grid make_grid(const Eigen::MatrixXd& atoms, const std::vector<int>& bins) {
  const int d = static_cast<int>(atoms.cols());
  Grid g;
  g.bins = bins;
  g.lo.resize(d);
  g.width.resize(d);
  for (int t = 0; t < d; ++t) {
    const double lo = atoms.col(t).minCoeff();
    const double hi = atoms.col(t).maxCoeff();
    if (!(hi > lo)) {
      std::ostringstream os;
      os << "bin_problem: all atoms coincide on axis " << t << " (degenerate grid)";
      throw std::invalid_argument(os.str());
    }
    g.lo[t] = lo;
    g.width[t] = hi - lo;
  }
  for (int b : bins) g.cells *= b;
  return g;
}

}  // namespace

BinnedProblem bin_problem(const UnfoldingProblem& problem,
                          const std::vector<int>& bins_per_axis, double epsilon_bin) {
  const int d = static_cast<int>(problem.kernel.atoms.cols());
  if (static_cast<int>(bins_per_axis.size()) != d) {
    throw std::invalid_argument("bin_problem: one bin count per axis required");
  }
  for (int b : bins_per_axis) {
    if (b < 2) throw std::invalid_argument("bin_problem: need at least 2 bins per axis");
  }
  if (!(epsilon_bin > 0.0 && epsilon_bin < 1.0)) {
    throw std::invalid_argument("bin_problem: epsilon_bin must lie in (0,1)");
  }

  const Grid kernel_grid = make_grid(problem.kernel.atoms, bins_per_axis);
  const Grid data_grid = make_grid(problem.data.points, bins_per_axis);
  const int cells = kernel_grid.cells;
  const int L = static_cast<int>(problem.kernel.R.cols());

  BinnedProblem out;
  out.epsilon_bin = epsilon_bin;
  out.bins_per_axis = bins_per_axis;
  out.grid_centers = kernel_grid.centers();
  out.data_grid_centers = data_grid.centers();
  out.R_bar = Eigen::MatrixXd::Zero(cells, L);
  for (int i = 0; i < problem.kernel.R.rows(); ++i) {
    out.R_bar.row(kernel_grid.cell_of(problem.kernel.atoms.row(i))) += problem.kernel.R.row(i);
  }
  out.nu_bar = Eigen::VectorXd::Zero(cells);
  for (int j = 0; j < problem.data.size(); ++j) {
    out.nu_bar[data_grid.cell_of(problem.data.points.row(j))] += problem.data.weights[j];
  }
  out.R_bar = (1.0 - epsilon_bin) * out.R_bar;
  out.R_bar.array() += epsilon_bin / cells;
  out.nu_bar = (1.0 - epsilon_bin) * out.nu_bar;
  out.nu_bar.array() += epsilon_bin / cells;
  return out;
}

Eigen::VectorXd rl_step(const BinnedProblem& binned, const Eigen::VectorXd& sigma) {
  if (sigma.size() != binned.R_bar.cols()) {
    throw std::invalid_argument("rl_step: sigma length mismatch");
  }
  if ((sigma.array() <= 0.0).any()) {
    throw std::invalid_argument("rl_step: sigma must be strictly positive");
  }
  const Eigen::VectorXd folded = binned.R_bar * sigma;
  if ((folded.array() <= 0.0).any()) {
    throw std::logic_error("rl_step: folded weights hit zero despite mixing");
  }
  return sigma.array() * (binned.R_bar.transpose() * (binned.nu_bar.array() / folded.array()).matrix()).array();
}

double rl_neg_log_likelihood(const BinnedProblem& binned, const Eigen::VectorXd& sigma) {
  const Eigen::VectorXd folded = binned.R_bar * sigma;
  return -(binned.nu_bar.array() * folded.array().log()).sum();
}

RlResult rl_solve(const UnfoldingProblem& problem, const std::vector<int>& bins_per_axis,
                  double epsilon_bin, int iters, Eigen::VectorXd sigma0,
                  const SigmaEvaluator& evaluator) {
  const BinnedProblem binned = bin_problem(problem, bins_per_axis, epsilon_bin);
  const int L = static_cast<int>(binned.R_bar.cols());
  if (sigma0.size() == 0) sigma0 = Eigen::VectorXd::Constant(L, 1.0 / L);
  if ((sigma0.array() <= 0.0).any()) {
    throw std::invalid_argument("rl_solve: sigma0 must be strictly positive");
  }

  SigmaEvaluator eval = evaluator;
  if (!eval) {
    eval = [&problem](const Eigen::VectorXd& sigma) {
      const DiscreteMeasure nus = push_forward(sigma, problem.kernel);
      if (problem.data.dim() == 1) return wasserstein_1d(nus, problem.data, problem.p);
      return wasserstein_exact(nus, problem.data, problem.p).first;
    };
  }

  RlResult result;
  result.sigma = sigma0;
  for (int it = 0; it < iters; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    result.sigma = rl_step(binned, result.sigma);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    IterationRecord rec;
    rec.iter = it;
    rec.sigma = result.sigma;
    rec.wpp = eval(result.sigma);
    rec.second_marginal_residual =
        (binned.R_bar * result.sigma - binned.nu_bar).cwiseAbs().maxCoeff();
    rec.ker_residual = 0.0;
    rec.elapsed_sec = elapsed;
    result.trace.push_back(std::move(rec));
  }
  return result;
}

}  // namespace unfold
