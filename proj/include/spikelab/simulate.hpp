#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "spikelab/linalg.hpp"
#include "spikelab/model.hpp"
#include "spikelab/theory.hpp"

namespace spikelab {

struct Dataset {
  Eigen::MatrixXd X;  // d x n, columns are samples
  Eigen::MatrixXd A;  // bulk part of X
  Eigen::VectorXd y;
  Eigen::VectorXd u;
  Eigen::VectorXd w;
  Eigen::VectorXd beta_star;
  std::uint64_t seed = 0;
};

// Draws X = theta u w^T + A and y. u is uniform on the sphere unless fixed_u is given.
Dataset sample_dataset(const ProblemSpec& spec, std::uint64_t seed, const Eigen::VectorXd* fixed_u = nullptr);

// Exact expectation over a fresh test point given beta_int.
RiskDecomposition conditional_risk(const Eigen::VectorXd& beta_int, const Eigen::VectorXd& beta_star,
                                   const Eigen::VectorXd& u, const ProblemSpec& spec);
RiskDecomposition conditional_risk(const Dataset& data, const Eigen::VectorXd& beta_int, const ProblemSpec& spec);

struct SampledRisk {
  double mean = 0.0;  // mean squared test error (includes test label noise)
  double std_error = 0.0;
  std::size_t points = 0;
};

// Squared error averaged over `points` sampled test points.
SampledRisk sampled_test_risk(const Dataset& data, const Eigen::VectorXd& beta_int, const ProblemSpec& spec,
                              std::size_t points, std::uint64_t seed);

struct MCOptions {
  unsigned threads = 0;  // 0 = default_thread_count()
  FitMethod method = FitMethod::Gram;
  bool fixed_u = false;
};

struct MCEstimate {
  double mean = 0.0;  // mean excess risk
  double std_error = 0.0;
  std::size_t trials = 0;
  RiskDecomposition per_term;         // per-term means
  RiskDecomposition per_term_stderr;  // per-term standard errors
  double max_relative_residual = 0.0;  // max ||y - X^T beta|| / ||y|| over trials when c > 1
};

MCEstimate monte_carlo_risk(const ProblemSpec& spec, std::size_t trials, std::uint64_t master_seed,
                            const MCOptions& options = {});

}  // namespace spikelab
