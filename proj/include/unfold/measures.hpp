#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace unfold {

// Finitely supported probability measure on R^d: one atom per row of
// `points`, weights on the simplex.
struct DiscreteMeasure {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// Discrete Markov kernel: column k of R is the distribution of measured
// outcomes for source point x_k, supported on the shared atom list {y_i}.
// Columns sum to 1; every row carries positive total mass.
struct KernelMatrix {
  Eigen::MatrixXd R;               // m x L, column-stochastic
  Eigen::MatrixXd atoms;           // m x d, the y_i
  Eigen::MatrixXd source_support;  // L x d, the x_k
};

struct UnfoldingProblem {
  Eigen::MatrixXd prior_support;  // L x d
  KernelMatrix kernel;
  DiscreteMeasure data;  // n atoms y'_j with weights nu_j
  double p = 2.0;
  Eigen::MatrixXd cost;  // m x n, |y_i - y'_j|^p
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Construction-time tolerances: weights within 1e-9 of unit mass are
// renormalized, anything further off is rejected; validation checks 1e-12.
inline constexpr double kWeightRenormWindow = 1e-9;
inline constexpr double kWeightTol = 1e-12;

DiscreteMeasure make_measure(Eigen::MatrixXd points, Eigen::VectorXd weights);
KernelMatrix make_kernel(Eigen::MatrixXd R, Eigen::MatrixXd atoms,
                         Eigen::MatrixXd source_support);
UnfoldingProblem make_problem(Eigen::MatrixXd prior_support, KernelMatrix kernel,
                              DiscreteMeasure data, double p);

ValidationReport validate_problem(const UnfoldingProblem& problem);

// nu_sigma = sum_i (R sigma)_i delta_{y_i}
DiscreteMeasure push_forward(const Eigen::VectorXd& sigma_weights,
                             const KernelMatrix& kernel);

// C_ij = |a_i - b_j|^p (Euclidean norm to the p-th power)
Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& atoms_a,
                            const Eigen::MatrixXd& atoms_b, double p);

}  // namespace unfold
