#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "unfold/measures.hpp"

namespace unfold {

// Vertex solution of the discrete Kantorovich LP.
struct TransportPlanExact {
  struct Entry {
    int i, j;
    double mass;
  };
  std::vector<Entry> pairs;
  double objective = 0.0;  // sum mass * C_ij
};

// W_p^p in one dimension via the coupled quantile sweep; exact up to rounding.
double wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

struct ExactOptions {
  int max_atoms = 5000;  // per side, after merging duplicates
};

// Exact W_p^p in any dimension: network simplex on the bipartite transport
// polytope. Duplicate atoms are merged (exact coordinate equality) before
// the solve; plan indices refer to the original atom lists.
std::pair<double, TransportPlanExact> wasserstein_exact(const DiscreteMeasure& mu,
                                                        const DiscreteMeasure& nu,
                                                        double p,
                                                        const ExactOptions& opts = {});

// Weighted moments used as physics summaries. The ratio is the weighted
// mean of pointwise ratios x1/x2 and is undefined when an atom with
// positive weight sits at x2 = 0.
struct Observables {
  double mean_x1 = 0.0;
  std::optional<double> mean_ratio_x1_x2;
  double variance = 0.0;  // <|x|^2> - |<x>|^2
  std::optional<double> mean_x2;
};

Observables observables(const DiscreteMeasure& measure);

// Gaussian kernel density estimate on a 1-d grid.
std::vector<double> kde_1d(const DiscreteMeasure& measure, double bandwidth,
                           const std::vector<double>& grid);

}  // namespace unfold
