#include "unfold/problems.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "unfold/rng.hpp"

namespace unfold {

namespace {

// rng streams, one per independent sampling role
enum Stream : std::uint64_t {
  kTruthComponent = 1,
  kTruthLocation = 2,
  kKernelPriorSide = 3,
  kKernelTruthSide = 4,
  kPriorIid = 5,
  kBasePoints = 6,
};

double apply_map(TransportMap map, double x) {
  if (map == TransportMap::Identity) return x;
  const double sgn = (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  return x + 0.5 * sgn;
}

// block-sparse column-stochastic kernel: column k puts mass 1/M on its own
// M sampled atoms
Eigen::MatrixXd block_kernel(int L, int M) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(L * M, L);
  for (int k = 0; k < L; ++k) {
    for (int j = 0; j < M; ++j) R(k * M + j, k) = 1.0 / M;
  }
  return R;
}

}  // namespace

GeneratedProblem generate_1d(const OneDimConfig& config) {
  if (config.L < 1 || config.L_prime < 1 || config.M < 1 || config.M_prime < 1) {
    throw std::invalid_argument("generate_1d: counts must be >= 1");
  }
  if (!(config.beta > 0.0)) throw std::invalid_argument("generate_1d: beta must be positive");
  double wsum = 0.0;
  for (const auto& c : config.mixture) {
    if (!(c.variance > 0.0)) throw std::invalid_argument("generate_1d: mixture variance must be positive");
    if (c.weight < 0.0) throw std::invalid_argument("generate_1d: mixture weight must be nonnegative");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw std::invalid_argument("generate_1d: mixture weights must sum to 1");

  const double noise_sd = std::sqrt(config.beta);

  // prior support on [lo, hi]
  Eigen::MatrixXd prior(config.L, 1);
  if (config.prior_iid) {
    CounterRng rng(config.seed, kPriorIid);
    for (int k = 0; k < config.L; ++k) {
      prior(k, 0) = config.prior_lo + (config.prior_hi - config.prior_lo) * rng.uniform(k);
    }
  } else if (config.L == 1) {
    prior(0, 0) = 0.5 * (config.prior_lo + config.prior_hi);
  } else {
    for (int k = 0; k < config.L; ++k) {
      prior(k, 0) = config.prior_lo +
                    (config.prior_hi - config.prior_lo) * k / (config.L - 1);
    }
  }

  // truth locations sampled from the mixture
  CounterRng comp_rng(config.seed, kTruthComponent);
  CounterRng loc_rng(config.seed, kTruthLocation);
  Eigen::MatrixXd truth(config.L_prime, 1);
  for (int k = 0; k < config.L_prime; ++k) {
    const double un = comp_rng.uniform(k);
    double acc = 0.0;
    std::size_t pick = config.mixture.size() - 1;
    for (std::size_t c = 0; c < config.mixture.size(); ++c) {
      acc += config.mixture[c].weight;
      if (un <= acc) {
        pick = c;
        break;
      }
    }
    const auto& cm = config.mixture[pick];
    truth(k, 0) = cm.center + std::sqrt(cm.variance) * loc_rng.normal(k);
  }

  // kernel samples, prior side
  CounterRng kp_rng(config.seed, kKernelPriorSide);
  Eigen::MatrixXd atoms(config.L * config.M, 1);
  for (int k = 0; k < config.L; ++k) {
    const double center = apply_map(config.map, prior(k, 0));
    for (int j = 0; j < config.M; ++j) {
      atoms(k * config.M + j, 0) =
          center + noise_sd * kp_rng.normal(static_cast<std::uint64_t>(k) * config.M + j);
    }
  }
  KernelMatrix kernel = make_kernel(block_kernel(config.L, config.M), atoms, prior);

  // measured data: truth-side samples carrying sigma'_k / M' each
  CounterRng kt_rng(config.seed, kKernelTruthSide);
  const int n = config.L_prime * config.M_prime;
  Eigen::MatrixXd data_points(n, 1);
  Eigen::VectorXd data_weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int k = 0; k < config.L_prime; ++k) {
    const double center = apply_map(config.map, truth(k, 0));
    for (int j = 0; j < config.M_prime; ++j) {
      data_points(k * config.M_prime + j, 0) =
          center + noise_sd * kt_rng.normal(static_cast<std::uint64_t>(k) * config.M_prime + j);
    }
  }

  GeneratedProblem out;
  out.sigma_true = make_measure(
      truth, Eigen::VectorXd::Constant(config.L_prime, 1.0 / config.L_prime));
  out.problem = make_problem(prior, std::move(kernel),
                             make_measure(data_points, data_weights), config.p);
  return out;
}

GeneratedProblem generate_2d(const TwoDimConfig& config, const KernelSampleFile* file) {
  if (config.L < 1 || config.L_prime < 1 || config.M < 1 || config.M_prime < 1) {
    throw std::invalid_argument("generate_2d: counts must be >= 1");
  }

  Eigen::MatrixXd prior(config.L, 2), truth(config.L_prime, 2);
  Eigen::MatrixXd atoms(config.L * config.M, 2);
  Eigen::MatrixXd data_points(config.L_prime * config.M_prime, 2);

  if (file != nullptr) {
    if (file->dim != 2) throw std::invalid_argument("generate_2d: sample file must be 2d");
    if (file->rows() < config.L + config.L_prime) {
      throw std::invalid_argument("generate_2d: sample file has insufficient rows");
    }
    if (file->samples_per_row < config.M || file->samples_per_row < config.M_prime) {
      throw std::invalid_argument("generate_2d: sample file has too few samples per row");
    }
    for (int k = 0; k < config.L; ++k) {
      prior.row(k) = file->locations[k].transpose();
      for (int j = 0; j < config.M; ++j) {
        atoms.row(k * config.M + j) = file->samples[k][j].transpose();
      }
    }
    for (int k = 0; k < config.L_prime; ++k) {
      truth.row(k) = file->locations[config.L + k].transpose();
      for (int j = 0; j < config.M_prime; ++j) {
        data_points.row(k * config.M_prime + j) =
            file->samples[config.L + k][j].transpose();
      }
    }
  } else {
    const Eigen::Matrix2d base_chol = Eigen::LLT<Eigen::Matrix2d>(config.base_cov).matrixL();
    const Eigen::Matrix2d noise_chol = Eigen::LLT<Eigen::Matrix2d>(config.noise_cov).matrixL();
    CounterRng base_rng(config.seed, kBasePoints);
    auto base_point = [&](int row) {
      Eigen::Vector2d g(base_rng.normal(2 * row), base_rng.normal(2 * row + 1));
      return (config.base_mean + base_chol * g).eval();
    };
    for (int k = 0; k < config.L; ++k) prior.row(k) = base_point(k).transpose();
    for (int k = 0; k < config.L_prime; ++k) truth.row(k) = base_point(config.L + k).transpose();

    CounterRng kp_rng(config.seed, kKernelPriorSide);
    for (int k = 0; k < config.L; ++k) {
      const Eigen::Vector2d center = prior.row(k).transpose() + config.noise_shift;
      for (int j = 0; j < config.M; ++j) {
        const std::uint64_t c = 2 * (static_cast<std::uint64_t>(k) * config.M + j);
        Eigen::Vector2d g(kp_rng.normal(c), kp_rng.normal(c + 1));
        atoms.row(k * config.M + j) = (center + noise_chol * g).transpose();
      }
    }
    CounterRng kt_rng(config.seed, kKernelTruthSide);
    for (int k = 0; k < config.L_prime; ++k) {
      const Eigen::Vector2d center = truth.row(k).transpose() + config.noise_shift;
      for (int j = 0; j < config.M_prime; ++j) {
        const std::uint64_t c = 2 * (static_cast<std::uint64_t>(k) * config.M_prime + j);
        Eigen::Vector2d g(kt_rng.normal(c), kt_rng.normal(c + 1));
        data_points.row(k * config.M_prime + j) = (center + noise_chol * g).transpose();
      }
    }
  }

  // truth weights proportional to the fixed diagonal Gaussian density
  Eigen::VectorXd log_w(config.L_prime);
  for (int k = 0; k < config.L_prime; ++k) {
    const double d1 = truth(k, 0) - config.weight_mean[0];
    const double d2 = truth(k, 1) - config.weight_mean[1];
    log_w[k] = -0.5 * (d1 * d1 / config.weight_var[0] + d2 * d2 / config.weight_var[1]);
  }
  log_w.array() -= log_w.maxCoeff();
  Eigen::VectorXd sigma_weights = log_w.array().exp();
  sigma_weights /= sigma_weights.sum();

  Eigen::VectorXd data_weights(config.L_prime * config.M_prime);
  for (int k = 0; k < config.L_prime; ++k) {
    for (int j = 0; j < config.M_prime; ++j) {
      data_weights[k * config.M_prime + j] = sigma_weights[k] / config.M_prime;
    }
  }

  KernelMatrix kernel = make_kernel(block_kernel(config.L, config.M), atoms, prior);
  GeneratedProblem out;
  out.sigma_true = make_measure(truth, sigma_weights);
  out.problem = make_problem(prior, std::move(kernel),
                             make_measure(data_points, data_weights), config.p);
  return out;
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, int lineno) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const std::string field = line.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(field, &used);
      while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
      if (used != field.size()) throw std::invalid_argument("trailing characters");
      out.push_back(v);
    } catch (const std::exception&) {
      std::ostringstream os;
      os << "ingest_kernel_csv: non-numeric field '" << field << "' at line " << lineno;
      throw std::invalid_argument(os.str());
    }
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return out;
}

}  // namespace

KernelSampleFile ingest_kernel_csv(const std::string& path, bool clean) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("ingest_kernel_csv: cannot open " + path);

  std::string line;
  int lineno = 0;
  // header: d,M
  do {
    if (!std::getline(in, line)) throw std::invalid_argument("ingest_kernel_csv: empty file");
    ++lineno;
  } while (line.find_first_not_of(" \t\r\n") == std::string::npos);

  KernelSampleFile file;
  {
    const std::vector<double> header = parse_csv_row(line, lineno);
    if (header.size() != 2) throw std::invalid_argument("ingest_kernel_csv: header must be 'd,M'");
    file.dim = static_cast<int>(header[0]);
    file.samples_per_row = static_cast<int>(header[1]);
    if (file.dim < 1 || file.samples_per_row < 1 ||
        header[0] != file.dim || header[1] != file.samples_per_row) {
      throw std::invalid_argument("ingest_kernel_csv: invalid header counts");
    }
  }
  const std::size_t expected = static_cast<std::size_t>(file.dim) * (1 + file.samples_per_row);

  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::vector<double> row = parse_csv_row(line, lineno);
    if (row.size() != expected) {
      std::ostringstream os;
      os << "ingest_kernel_csv: line " << lineno << " has " << row.size()
         << " fields, expected " << expected;
      throw std::invalid_argument(os.str());
    }
    Eigen::VectorXd x(file.dim);
    for (int t = 0; t < file.dim; ++t) x[t] = row[t];
    std::vector<Eigen::VectorXd> zs(file.samples_per_row, Eigen::VectorXd(file.dim));
    for (int j = 0; j < file.samples_per_row; ++j) {
      for (int t = 0; t < file.dim; ++t) zs[j][t] = row[file.dim * (1 + j) + t];
    }
    for (const auto& z : zs) {
      if (!z.allFinite()) throw std::invalid_argument("ingest_kernel_csv: non-finite sample");
    }
    if (!x.allFinite()) throw std::invalid_argument("ingest_kernel_csv: non-finite location");
    file.locations.push_back(std::move(x));
    file.samples.push_back(std::move(zs));
  }
  if (file.rows() == 0) throw std::invalid_argument("ingest_kernel_csv: no data rows");

  if (clean && file.rows() >= 2) {
    // single pass: statistics on raw samples, then replacement
    for (int t = 0; t < file.dim; ++t) {
      double sum = 0.0, sum2 = 0.0;
      long count = 0;
      for (const auto& zs : file.samples) {
        for (const auto& z : zs) {
          sum += z[t];
          sum2 += z[t] * z[t];
          ++count;
        }
      }
      const double mean = sum / count;
      const double var = (sum2 - count * mean * mean) / (count - 1);
      if (!(var > 0.0)) continue;  // constant component, nothing to flag
      const double sd = std::sqrt(var);
      for (auto& zs : file.samples) {
        for (auto& z : zs) {
          if (std::abs(z[t] - mean) > 5.0 * sd) z[t] = mean;
        }
      }
    }
  }
  return file;
}

void write_kernel_csv(const std::string& path, const KernelSampleFile& file) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_kernel_csv: cannot open " + path);
  out << file.dim << "," << file.samples_per_row << "\n";
  char buf[32];
  for (int r = 0; r < file.rows(); ++r) {
    bool first = true;
    auto put = [&](double v) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      if (!first) out << ",";
      out << buf;
      first = false;
    };
    for (int t = 0; t < file.dim; ++t) put(file.locations[r][t]);
    for (const auto& z : file.samples[r])
      for (int t = 0; t < file.dim; ++t) put(z[t]);
    out << "\n";
  }
}

}  // namespace unfold
