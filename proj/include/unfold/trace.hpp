#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace unfold {

// One row of an experiment trace: the current unfolded weights together
// with W_p^p(nu_sigma, nu) and the solver residuals at that iteration.
struct IterationRecord {
  int iter = 0;
  Eigen::VectorXd sigma;
  double wpp = 0.0;  // W_p^p against the measured data
  double second_marginal_residual = 0.0;
  double ker_residual = 0.0;
  double elapsed_sec = 0.0;
};

using IterationTrace = std::vector<IterationRecord>;

// Maps an unfolded weight vector to W_p^p(nu_sigma, nu).
using SigmaEvaluator = std::function<double(const Eigen::VectorXd&)>;

}  // namespace unfold
