#pragma once

#include <Eigen/Dense>
#include <vector>

namespace unfold::detail {

// min <C, X> over X >= 0 with row sums a and column sums b (sum a == sum b).
struct TransportResult {
  struct Arc {
    int i, j;
    double flow;
  };
  std::vector<Arc> basis;    // spanning-tree arcs, flow >= 0
  double objective = 0.0;
  double dual_violation = 0.0;  // max_i,j (u_i + v_j - C_ij), optimality certificate
  Eigen::VectorXd u, v;         // optimal potentials
};

TransportResult solve_transport(const Eigen::MatrixXd& cost, Eigen::VectorXd a,
                                Eigen::VectorXd b);

}  // namespace unfold::detail
