#include "unfold/measures.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace unfold {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + " contains non-finite entries");
  }
}

}  // namespace

DiscreteMeasure make_measure(Eigen::MatrixXd points, Eigen::VectorXd weights) {
  if (points.rows() != weights.size()) {
    throw std::invalid_argument("make_measure: points/weights length mismatch");
  }
  if (points.rows() == 0) {
    throw std::invalid_argument("make_measure: empty measure");
  }
  check_finite(points, "points");
  check_finite(weights, "weights");
  if ((weights.array() < 0.0).any()) {
    throw std::invalid_argument("make_measure: negative weight");
  }
  const double total = weights.sum();
  if (std::abs(total - 1.0) > kWeightRenormWindow) {
    std::ostringstream os;
    os << "make_measure: weights sum to " << total << ", outside renormalization window";
    throw std::invalid_argument(os.str());
  }
  weights /= total;
  return DiscreteMeasure{std::move(points), std::move(weights)};
}

KernelMatrix make_kernel(Eigen::MatrixXd R, Eigen::MatrixXd atoms,
                         Eigen::MatrixXd source_support) {
  if (R.rows() != atoms.rows()) {
    throw std::invalid_argument("make_kernel: R rows must match atom count");
  }
  if (R.cols() != source_support.rows()) {
    throw std::invalid_argument("make_kernel: R cols must match source support size");
  }
  check_finite(R, "R");
  check_finite(atoms, "atoms");
  if ((R.array() < 0.0).any()) {
    throw std::invalid_argument("make_kernel: negative kernel entry");
  }
  for (int k = 0; k < R.cols(); ++k) {
    const double s = R.col(k).sum();
    if (std::abs(s - 1.0) > kWeightRenormWindow) {
      std::ostringstream os;
      os << "make_kernel: column " << k << " sums to " << s;
      throw std::invalid_argument(os.str());
    }
    R.col(k) /= s;
  }
  for (int i = 0; i < R.rows(); ++i) {
    if (R.row(i).sum() <= 0.0) {
      std::ostringstream os;
      os << "make_kernel: row " << i << " has zero mass (atom would be removable)";
      throw std::invalid_argument(os.str());
    }
  }
  return KernelMatrix{std::move(R), std::move(atoms), std::move(source_support)};
}

UnfoldingProblem make_problem(Eigen::MatrixXd prior_support, KernelMatrix kernel,
                              DiscreteMeasure data, double p) {
  if (p < 1.0) {
    throw std::invalid_argument("make_problem: cost exponent p must be >= 1");
  }
  UnfoldingProblem problem;
  problem.prior_support = std::move(prior_support);
  problem.kernel = std::move(kernel);
  problem.data = std::move(data);
  problem.p = p;
  problem.cost = cost_matrix(problem.kernel.atoms, problem.data.points, p);
  ValidationReport report = validate_problem(problem);
  if (!report.ok()) {
    throw std::invalid_argument("make_problem: " + report.violations.front());
  }
  return problem;
}

ValidationReport validate_problem(const UnfoldingProblem& problem) {
  ValidationReport report;
  auto add = [&report](const std::string& s) { report.violations.push_back(s); };

  const auto& R = problem.kernel.R;
  const auto& nu = problem.data.weights;
  const int m = static_cast<int>(R.rows());
  const int L = static_cast<int>(R.cols());
  const int n = problem.data.size();

  if (problem.data.points.rows() != nu.size()) add("data points/weights length mismatch");
  if ((nu.array() < 0.0).any()) add("data has a negative weight");
  if (std::abs(nu.sum() - 1.0) > kWeightTol) add("weights not normalized");
  for (int k = 0; k < L; ++k) {
    if (std::abs(R.col(k).sum() - 1.0) > kWeightTol) {
      std::ostringstream os;
      os << "kernel column " << k << " not stochastic";
      add(os.str());
    }
  }
  for (int i = 0; i < m; ++i) {
    if (!(R.row(i).sum() > 0.0)) {
      std::ostringstream os;
      os << "row sum zero at " << i;
      add(os.str());
    }
  }
  if ((R.array() < 0.0).any()) add("kernel has a negative entry");
  if (problem.p < 1.0) add("cost exponent p < 1");
  if (problem.cost.rows() != m || problem.cost.cols() != n) add("cost dimensions mismatch kernel/data");
  if (!problem.cost.allFinite() || (problem.cost.array() < 0.0).any()) add("cost has negative or non-finite entries");
  if (problem.kernel.source_support.rows() != problem.prior_support.rows() ||
      problem.kernel.source_support != problem.prior_support) {
    add("kernel source support differs from prior support");
  }
  if (problem.kernel.atoms.cols() != problem.data.points.cols()) add("atom dimensions differ between kernel and data");
  return report;
}

DiscreteMeasure push_forward(const Eigen::VectorXd& sigma_weights,
                             const KernelMatrix& kernel) {
  if (sigma_weights.size() != kernel.R.cols()) {
    throw std::invalid_argument("push_forward: sigma length mismatches kernel columns");
  }
  DiscreteMeasure out;
  out.points = kernel.atoms;
  out.weights = kernel.R * sigma_weights;
  return out;
}

Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& atoms_a,
                            const Eigen::MatrixXd& atoms_b, double p) {
  if (atoms_a.cols() != atoms_b.cols()) {
    throw std::invalid_argument("cost_matrix: dimension mismatch");
  }
  if (p < 1.0) {
    throw std::invalid_argument("cost_matrix: p must be >= 1");
  }
  const int m = static_cast<int>(atoms_a.rows());
  const int n = static_cast<int>(atoms_b.rows());
  Eigen::MatrixXd C(m, n);
  const bool squared = (p == 2.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d2 = (atoms_a.row(i) - atoms_b.row(j)).squaredNorm();
      C(i, j) = squared ? d2 : std::pow(std::sqrt(d2), p);
    }
  }
  return C;
}

}  // namespace unfold
