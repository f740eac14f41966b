#include "unfold/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "unfold/detail/network_simplex.hpp"

namespace unfold {

namespace {

double pow_abs(double d, double p) {
  if (p == 2.0) return d * d;
  if (p == 1.0) return std::abs(d);
  return std::pow(std::abs(d), p);
}

}  // namespace

double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  if (mu.dim() != 1 || nu.dim() != 1) {
    throw std::invalid_argument("wasserstein_1d: measures must be one dimensional");
  }
  std::vector<int> ia(mu.size()), ib(nu.size());
  std::iota(ia.begin(), ia.end(), 0);
  std::iota(ib.begin(), ib.end(), 0);
  std::stable_sort(ia.begin(), ia.end(),
                   [&](int a, int b) { return mu.points(a, 0) < mu.points(b, 0); });
  std::stable_sort(ib.begin(), ib.end(),
                   [&](int a, int b) { return nu.points(a, 0) < nu.points(b, 0); });

  double total = 0.0;
  std::size_t i = 0, j = 0;
  double ra = mu.weights[ia[0]], rb = nu.weights[ib[0]];
  while (true) {
    const double t = std::min(ra, rb);
    total += t * pow_abs(mu.points(ia[i], 0) - nu.points(ib[j], 0), p);
    ra -= t;
    rb -= t;
    if (ra <= 1e-18) {
      if (++i == ia.size()) break;
      ra = mu.weights[ia[i]];
    }
    if (rb <= 1e-18) {
      if (++j == ib.size()) break;
      rb = nu.weights[ib[j]];
    }
  }
  return total;
}

namespace {

// Collapse exactly-coincident atoms; keeps the first original index of each
// group for reporting.
struct Merged {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
  std::vector<int> first_index;
};

Merged merge_atoms(const DiscreteMeasure& m) {
  std::vector<int> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  const int d = m.dim();
  auto less = [&](int a, int b) {
    for (int t = 0; t < d; ++t) {
      if (m.points(a, t) != m.points(b, t)) return m.points(a, t) < m.points(b, t);
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);

  Merged out;
  std::vector<double> w;
  std::vector<int> first;
  std::vector<int> rows;
  for (int idx : order) {
    if (m.weights[idx] == 0.0) continue;
    const bool same = !rows.empty() && [&] {
      const int prev = rows.back();
      for (int t = 0; t < d; ++t)
        if (m.points(prev, t) != m.points(idx, t)) return false;
      return true;
    }();
    if (same) {
      w.back() += m.weights[idx];
    } else {
      rows.push_back(idx);
      w.push_back(m.weights[idx]);
      first.push_back(idx);
    }
  }
  if (rows.empty()) throw std::invalid_argument("wasserstein_exact: measure has no mass");
  out.points.resize(rows.size(), d);
  out.weights.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.points.row(r) = m.points.row(rows[r]);
    out.weights[r] = w[r];
  }
  out.first_index = std::move(first);
  return out;
}

}  // namespace

std::pair<double, TransportPlanExact> wasserstein_exact(const DiscreteMeasure& mu,
                                                        const DiscreteMeasure& nu,
                                                        double p,
                                                        const ExactOptions& opts) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("wasserstein_exact: dimension mismatch");
  Merged a = merge_atoms(mu);
  Merged b = merge_atoms(nu);
  if (a.points.rows() > opts.max_atoms || b.points.rows() > opts.max_atoms) {
    throw std::invalid_argument("wasserstein_exact: support exceeds the desk-scale cap");
  }
  const Eigen::MatrixXd C = cost_matrix(a.points, b.points, p);
  detail::TransportResult res = detail::solve_transport(C, a.weights, b.weights);

  TransportPlanExact plan;
  plan.objective = res.objective;
  for (const auto& arc : res.basis) {
    if (arc.flow > 0.0) {
      plan.pairs.push_back({a.first_index[arc.i], b.first_index[arc.j], arc.flow});
    }
  }
  return {res.objective, plan};
}

Observables observables(const DiscreteMeasure& measure) {
  const int d = measure.dim();
  Observables out;
  out.mean_x1 = measure.weights.dot(measure.points.col(0));
  Eigen::VectorXd mean = measure.points.transpose() * measure.weights;
  double second = 0.0;
  for (int i = 0; i < measure.size(); ++i) {
    second += measure.weights[i] * measure.points.row(i).squaredNorm();
  }
  out.variance = second - mean.squaredNorm();
  if (d >= 2) {
    out.mean_x2 = measure.weights.dot(measure.points.col(1));
    bool defined = true;
    double ratio = 0.0;
    for (int i = 0; i < measure.size(); ++i) {
      const double x2 = measure.points(i, 1);
      if (x2 == 0.0 && measure.weights[i] > 0.0) {
        defined = false;
        break;
      }
      if (measure.weights[i] > 0.0) ratio += measure.weights[i] * measure.points(i, 0) / x2;
    }
    if (defined) out.mean_ratio_x1_x2 = ratio;
  }
  return out;
}

std::vector<double> kde_1d(const DiscreteMeasure& measure, double bandwidth,
                           const std::vector<double>& grid) {
  if (measure.dim() != 1) throw std::invalid_argument("kde_1d: measure must be one dimensional");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kde_1d: bandwidth must be positive");
  const double norm = 1.0 / (bandwidth * std::sqrt(2.0 * 3.14159265358979323846));
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (int i = 0; i < measure.size(); ++i) {
      const double z = (grid[g] - measure.points(i, 0)) / bandwidth;
      acc += measure.weights[i] * std::exp(-0.5 * z * z);
    }
    out[g] = norm * acc;
  }
  return out;
}

}  // namespace unfold
