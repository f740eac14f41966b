#include "unfold/klproj.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace unfold {

namespace {
constexpr double kFloor = 1e-300;
}

double lambert_w(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("lambert_w: negative or NaN input");
  if (x == 0.0) return 0.0;
  double w = std::log1p(x);
  for (int it = 0; it < 50; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    // Halley step for f(w) = w e^w - x
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double wn = w - f / denom;
    if (std::abs(wn - w) <= 1e-15 * std::max(1.0, std::abs(wn))) return wn;
    w = wn;
  }
  return w;
}

double lambert_w_exp(double t) {
  // solve w + log w = t
  if (t < -700.0) return std::exp(t);  // w ~ e^t far below the log scale
  double w = (t > 1.0) ? t - std::log(t) : std::exp(std::min(t, 1.0));
  for (int it = 0; it < 50; ++it) {
    const double f = w + std::log(w) - t;
    double wn = w - f / (1.0 + 1.0 / w);
    if (wn <= 0.0) wn = w * 1e-3;
    if (std::abs(wn - w) <= 1e-16 * std::abs(wn)) return wn;
    w = wn;
  }
  return w;
}

ConstraintOperator::ConstraintOperator(Eigen::MatrixXd R) : R_(std::move(R)) {
  const int mm = m();
  const int n = size();
  Eigen::MatrixXd Bt(n, mm);  // B^T, with B = [Id_m, -R]
  Bt.topRows(mm) = Eigen::MatrixXd::Identity(mm, mm);
  Bt.bottomRows(L()) = -R_.transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Bt);
  Eigen::MatrixXd Q1 = qr.householderQ() * Eigen::MatrixXd::Identity(n, mm);
  proj_ = Eigen::MatrixXd::Identity(n, n) - Q1 * Q1.transpose();
}

Eigen::MatrixXd ConstraintOperator::B() const {
  Eigen::MatrixXd out(m(), size());
  out.leftCols(m()) = Eigen::MatrixXd::Identity(m(), m());
  out.rightCols(L()) = -R_;
  return out;
}

Eigen::VectorXd ConstraintOperator::apply_B(const Eigen::VectorXd& x) const {
  if (x.size() != size()) throw std::invalid_argument("apply_B: length mismatch");
  return x.head(m()) - R_ * x.tail(L());
}

Eigen::VectorXd orth_project(const ConstraintOperator& op, const Eigen::VectorXd& x) {
  if (x.size() != op.size()) throw std::invalid_argument("orth_project: length mismatch");
  return op.orth_projector() * x;
}

KlProjection kl_project_ker(const ConstraintOperator& op, const Eigen::VectorXd& w,
                            double tau, int iters) {
  if (w.size() != op.size()) throw std::invalid_argument("kl_project_ker: length mismatch");
  if (!(tau > 0.0)) throw std::invalid_argument("kl_project_ker: tau must be positive");
  if (iters < 1) throw std::invalid_argument("kl_project_ker: iters must be >= 1");
  for (int i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) {
      std::ostringstream os;
      os << "kl_project_ker: w must be strictly positive (entry " << i << " is " << w[i] << ")";
      throw std::invalid_argument(os.str());
    }
  }

  const Eigen::VectorXd log_w = w.array().log();
  const double log_tau = std::log(tau);
  Eigen::VectorXd x = w;
  Eigen::VectorXd y(w.size()), z(w.size());
  for (int it = 0; it < iters; ++it) {
    y.noalias() = op.orth_projector() * x;
    for (int i = 0; i < w.size(); ++i) {
      z[i] = tau * lambert_w_exp(log_w[i] - log_tau + (2.0 * y[i] - x[i]) / tau);
    }
    x += z - y;
  }
  z = z.cwiseMax(kFloor);
  KlProjection out;
  out.ker_residual = op.apply_B(z).cwiseAbs().maxCoeff();
  out.value = std::move(z);
  return out;
}

}  // namespace unfold
