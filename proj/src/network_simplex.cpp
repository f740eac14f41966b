#include "unfold/detail/network_simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace unfold::detail {

namespace {

struct Arc {
  int i, j;      // left node i, right node j (column index, not offset)
  double flow;
};

}  // namespace

// Primal network simplex on the complete bipartite transportation graph.
// The basis is a spanning tree over m+n nodes (left 0..m-1, right m..m+n-1);
// it is rebuilt from the basic arc list after every pivot, which costs
// O(m+n) and keeps the pivot logic simple at desk scale.
TransportResult solve_transport(const Eigen::MatrixXd& cost, Eigen::VectorXd a,
                                Eigen::VectorXd b) {
  const int m = static_cast<int>(cost.rows());
  const int n = static_cast<int>(cost.cols());
  if (a.size() != m || b.size() != n) {
    throw std::invalid_argument("solve_transport: marginal sizes mismatch cost");
  }
  if ((a.array() < 0).any() || (b.array() < 0).any()) {
    throw std::invalid_argument("solve_transport: negative mass");
  }
  const double ta = a.sum(), tb = b.sum();
  if (ta <= 0.0 || tb <= 0.0) {
    throw std::invalid_argument("solve_transport: zero total mass");
  }
  b *= ta / tb;

  // Northwest-corner starting basis: exactly m+n-1 arcs forming a tree.
  std::vector<Arc> basis;
  basis.reserve(m + n - 1);
  {
    int i = 0, j = 0;
    double ra = a[0], rb = b[0];
    while (true) {
      const double t = std::min(ra, rb);
      basis.push_back({i, j, t});
      ra -= t;
      rb -= t;
      if (i == m - 1 && j == n - 1) break;
      if ((ra <= rb && i < m - 1) || j == n - 1) {
        ++i;
        ra = a[i];
      } else {
        ++j;
        rb = b[j];
      }
    }
  }

  const int nodes = m + n;
  std::vector<std::vector<int>> adj(nodes);  // arc indices per node
  std::vector<int> parent(nodes), parent_arc(nodes), depth(nodes), order(nodes);
  Eigen::VectorXd u(m), v(n);

  auto rebuild = [&]() {
    for (auto& lst : adj) lst.clear();
    for (int t = 0; t < static_cast<int>(basis.size()); ++t) {
      adj[basis[t].i].push_back(t);
      adj[m + basis[t].j].push_back(t);
    }
    parent[0] = -1;
    parent_arc[0] = -1;
    depth[0] = 0;
    u[0] = 0.0;
    int head = 0, tail = 0;
    order[tail++] = 0;
    std::vector<char> seen(nodes, 0);
    seen[0] = 1;
    while (head < tail) {
      const int x = order[head++];
      for (int t : adj[x]) {
        const int y = (x == basis[t].i) ? m + basis[t].j : basis[t].i;
        if (seen[y]) continue;
        seen[y] = 1;
        parent[y] = x;
        parent_arc[y] = t;
        depth[y] = depth[x] + 1;
        if (y >= m) v[y - m] = cost(basis[t].i, basis[t].j) - u[basis[t].i];
        else u[y] = cost(basis[t].i, basis[t].j) - v[basis[t].j];
        order[tail++] = y;
      }
    }
    if (tail != nodes) throw std::runtime_error("solve_transport: basis does not span");
  };

  rebuild();

  const double cscale = cost.cwiseAbs().maxCoeff() + 1.0;
  const double tol = 1e-11 * cscale;
  const long max_pivots = 2000 + 100L * nodes;
  const long total_arcs = static_cast<long>(m) * n;
  const long block = std::max<long>(64, static_cast<long>(std::sqrt(static_cast<double>(total_arcs))));
  long scan_start = 0;

  std::vector<int> path_arcs;
  path_arcs.reserve(nodes);

  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots) throw std::runtime_error("solve_transport: pivot limit exceeded");

    // entering arc: best reduced cost within a block, scanning blocks round-robin
    int ei = -1, ej = -1;
    {
      double best = -tol;
      long scanned = 0;
      long pos = scan_start;
      while (scanned < total_arcs) {
        const long stop = std::min(scanned + block, total_arcs);
        for (; scanned < stop; ++scanned, ++pos) {
          if (pos >= total_arcs) pos = 0;
          const int i = static_cast<int>(pos / n);
          const int j = static_cast<int>(pos % n);
          const double rc = cost(i, j) - u[i] - v[j];
          if (rc < best) {
            best = rc;
            ei = i;
            ej = j;
          }
        }
        if (ei >= 0) break;
      }
      scan_start = pos % total_arcs;
    }
    if (ei < 0) break;  // dual feasible: optimal

    // cycle = entering arc + tree path between its endpoints
    path_arcs.clear();
    int x = ei, y = m + ej;
    int na = 0;  // arcs collected on the x side (stored first, reversed later)
    while (depth[x] > depth[y]) {
      path_arcs.push_back(parent_arc[x]);
      x = parent[x];
      ++na;
    }
    while (depth[y] > depth[x]) {
      path_arcs.push_back(parent_arc[y]);
      y = parent[y];
    }
    while (x != y) {
      path_arcs.insert(path_arcs.begin() + na, parent_arc[x]);
      x = parent[x];
      ++na;
      path_arcs.push_back(parent_arc[y]);
      y = parent[y];
    }
    // walk the cycle contiguously starting after the entering arc: the
    // x-side arcs from ei up to the apex, then the y-side arcs from the
    // apex down to ej; arcs at odd positions in the alternation lose flow
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    int posn = 1;
    auto consider = [&](int t) {
      if (posn % 2 == 1) {
        if (basis[t].flow <= theta) {
          theta = basis[t].flow;
          leaving = t;
        }
      }
      ++posn;
    };
    for (int t = 0; t < na; ++t) consider(path_arcs[t]);
    for (int t = static_cast<int>(path_arcs.size()) - 1; t >= na; --t) consider(path_arcs[t]);

    if (leaving < 0) throw std::runtime_error("solve_transport: unbounded cycle");

    posn = 1;
    auto apply = [&](int t) {
      basis[t].flow += (posn % 2 == 1) ? -theta : theta;
      if (basis[t].flow < 0.0) basis[t].flow = 0.0;
      ++posn;
    };
    for (int t = 0; t < na; ++t) apply(path_arcs[t]);
    for (int t = static_cast<int>(path_arcs.size()) - 1; t >= na; --t) apply(path_arcs[t]);

    basis[leaving] = {ei, ej, theta};
    rebuild();
  }

  TransportResult result;
  result.u = u;
  result.v = v;
  double obj = 0.0;
  for (const Arc& arc : basis) {
    obj += arc.flow * cost(arc.i, arc.j);
    result.basis.push_back({arc.i, arc.j, arc.flow});
  }
  result.objective = obj;
  double viol = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) viol = std::max(viol, u[i] + v[j] - cost(i, j));
  result.dual_violation = viol;
  return result;
}

}  // namespace unfold::detail
