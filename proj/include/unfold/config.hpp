#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "unfold/ot_unfold.hpp"
#include "unfold/problems.hpp"

namespace unfold {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Fully resolved run configuration. Every field has a default, so a minimal
// config names only the generator; the resolved form is serialized into
// every artifact, and parsing that serialization reproduces the run.
struct RunConfig {
  int schema_version = 1;

  std::string generator = "gauss1d";  // gauss1d | synthetic2d | csv2d
  OneDimConfig one_d;
  TwoDimConfig two_d;
  std::string kernel_csv;  // csv2d input path
  bool csv_clean = true;

  SolveConfig solver;

  std::vector<int> rl_bins;                     // scalar bin counts
  std::vector<std::array<int, 2>> rl_bin_pairs; // explicit per-axis pairs (2d)
  double epsilon_bin = 1e-40;
  int rl_iters = 200;

  std::string eval_backend = "exact";  // exact | entropic
  double eval_entropic_epsilon = 1e-3;
  int eval_entropic_iters = 200;
  int max_lp_atoms = 5000;

  std::vector<std::uint64_t> seeds = {1};
  int threads = 1;

  std::vector<double> sweep_epsilon;
  std::vector<int> sweep_M;
  std::vector<int> sweep_n_bin;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);
std::string serialize_config(const RunConfig& cfg);

// Per-axis bin counts for one scalar entry or pair, given the problem
// dimension. A scalar in 2d is read as a total cell budget realized on the
// nearest square grid.
std::vector<int> resolve_bins(const RunConfig& cfg, std::size_t index, int dim);
std::size_t bin_choice_count(const RunConfig& cfg);
std::string bin_choice_label(const RunConfig& cfg, std::size_t index);

}  // namespace unfold
