#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "unfold/measures.hpp"

namespace unfold {

struct MixtureComponent {
  double weight, center, variance;
};

enum class TransportMap { Identity, ShiftSign };  // id, or id + (1/2) sgn

// One dimensional synthetic unfolding problem: truth sampled from a
// Gaussian mixture, Gaussian noise of variance beta applied through the
// transport map, prior supported on [prior_lo, prior_hi].
struct OneDimConfig {
  int L = 150;        // prior support size
  int L_prime = 150;  // truth sample count
  int M = 1;          // kernel samples per prior point
  int M_prime = 3;    // kernel samples per truth point
  std::vector<MixtureComponent> mixture = {
      {0.25, 0.75, 0.05}, {0.5, -0.75, 0.05}, {0.25, 0.0, 0.05}};
  double beta = 0.01;  // noise variance
  TransportMap map = TransportMap::ShiftSign;
  double prior_lo = -1.0, prior_hi = 1.0;
  bool prior_iid = false;  // equally spaced grid by default
  double p = 2.0;
  std::uint64_t seed = 0;
};

// Two dimensional analogue with a correlated-Gaussian base sampler standing
// in for jet observables; truth weights proportional to a fixed Gaussian
// density, per the construction with N((30,-5), diag(10,2)).
struct TwoDimConfig {
  int L = 100;
  int L_prime = 100;
  int M = 2;
  int M_prime = 3;
  Eigen::Vector2d base_mean{28.0, -4.0};
  Eigen::Matrix2d base_cov{{25.0, 6.0}, {6.0, 9.0}};
  Eigen::Vector2d noise_shift{0.8, -0.4};
  Eigen::Matrix2d noise_cov{{4.0, 0.6}, {0.6, 1.0}};
  Eigen::Vector2d weight_mean{30.0, -5.0};
  Eigen::Vector2d weight_var{10.0, 2.0};  // diagonal covariance
  double p = 2.0;
  std::uint64_t seed = 0;
};

// Pre-generated kernel samples: each row holds a location x in R^d followed
// by M sampled outcomes z_1..z_M in R^d.
struct KernelSampleFile {
  int dim = 0;
  int samples_per_row = 0;  // M
  std::vector<Eigen::VectorXd> locations;
  std::vector<std::vector<Eigen::VectorXd>> samples;

  int rows() const { return static_cast<int>(locations.size()); }
};

struct GeneratedProblem {
  UnfoldingProblem problem;
  DiscreteMeasure sigma_true;
};

GeneratedProblem generate_1d(const OneDimConfig& config);
GeneratedProblem generate_2d(const TwoDimConfig& config,
                             const KernelSampleFile* file = nullptr);

// CSV schema: header "d,M", then rows x_1..x_d, z1_1..z1_d, ..., zM_1..zM_d.
// When clean is set, sample coordinates more than five standard deviations
// from the per-component mean (statistics over all rows and samples, taken
// once on the raw data) are replaced by that mean. Files with fewer than
// two rows, or components with zero spread, are left untouched.
KernelSampleFile ingest_kernel_csv(const std::string& path, bool clean);

void write_kernel_csv(const std::string& path, const KernelSampleFile& file);

}  // namespace unfold
