#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace unfold {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log sum_i exp(v_i), max-shifted; -inf entries contribute nothing.
inline double logsumexp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
  return m + std::log(acc);
}

// out_i = log sum_j exp(M_ij + add_j)
inline Eigen::VectorXd lse_rows(const Eigen::MatrixXd& M, const Eigen::VectorXd& add) {
  Eigen::VectorXd out(M.rows());
  Eigen::VectorXd row(M.cols());
  for (int i = 0; i < M.rows(); ++i) {
    row = M.row(i).transpose() + add;
    out[i] = logsumexp(row);
  }
  return out;
}

// out_j = log sum_i exp(M_ij + add_i)
inline Eigen::VectorXd lse_cols(const Eigen::MatrixXd& M, const Eigen::VectorXd& add) {
  Eigen::VectorXd out(M.cols());
  Eigen::VectorXd col(M.rows());
  for (int j = 0; j < M.cols(); ++j) {
    col = M.col(j) + add;
    out[j] = logsumexp(col);
  }
  return out;
}

}  // namespace unfold
