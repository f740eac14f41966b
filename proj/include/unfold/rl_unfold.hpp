#pragma once

#include <Eigen/Dense>
#include <vector>

#include "unfold/measures.hpp"
#include "unfold/trace.hpp"

namespace unfold {

// Grid-binned approximation of an unfolding problem for the
// Richardson-Lucy baseline. Kernel atoms and data atoms are histogrammed
// onto separate regular grids, each spanning its own per-coordinate range,
// and both weight families are mixed with a uniform floor epsilon_bin to
// keep the KL loss finite.
struct BinnedProblem {
  Eigen::MatrixXd grid_centers;       // n_cells x d, kernel-side grid
  Eigen::MatrixXd data_grid_centers;  // n_cells x d, data-side grid
  Eigen::MatrixXd R_bar;              // n_cells x L, column-stochastic
  Eigen::VectorXd nu_bar;             // length n_cells, on the simplex
  double epsilon_bin = 0.0;
  std::vector<int> bins_per_axis;
};

// Cells are half-open [edge, next_edge) with the last cell closed, so atoms
// at the global max land in the final cell. A coordinate whose atoms all
// coincide is rejected (degenerate grid).
BinnedProblem bin_problem(const UnfoldingProblem& problem,
                          const std::vector<int>& bins_per_axis, double epsilon_bin);

// Multiplicative EM update: sigma'_k = sigma_k sum_j R_bar_jk nu_bar_j / (R_bar sigma)_j
Eigen::VectorXd rl_step(const BinnedProblem& binned, const Eigen::VectorXd& sigma);

// -sum_j nu_bar_j log (R_bar sigma)_j
double rl_neg_log_likelihood(const BinnedProblem& binned, const Eigen::VectorXd& sigma);

struct RlResult {
  Eigen::VectorXd sigma;
  IterationTrace trace;
};

// Runs RL on the binned problem; the trace evaluates W_p^p through the
// original unbinned kernel. An empty sigma0 selects the uniform start, an
// empty evaluator the exact Wasserstein backend.
RlResult rl_solve(const UnfoldingProblem& problem, const std::vector<int>& bins_per_axis,
                  double epsilon_bin, int iters, Eigen::VectorXd sigma0 = {},
                  const SigmaEvaluator& evaluator = {});

}  // namespace unfold
