#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "spikelab/model.hpp"

namespace spikelab {

// Quantities of the rank-one update eta u v^T + A, with A of size d x n.
struct HelperQuantities {
  Eigen::VectorXd h;  // (v^T A^+)^T, length d
  Eigen::VectorXd k;  // A^+ u, length n
  Eigen::VectorXd t;  // (I - A^+ A) v, length n
  Eigen::VectorXd s;  // (I - A A^+) u, length d
  double xi = 1.0;    // 1 + eta v^T A^+ u
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double h_norm2 = 0.0;
  double k_norm2 = 0.0;
  double t_norm2 = 0.0;
  double s_norm2 = 0.0;
};

HelperQuantities helper_quantities(double eta, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                   const Eigen::MatrixXd& A, const Eigen::MatrixXd& A_pinv);
HelperQuantities helper_quantities(double eta, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                   const Eigen::MatrixXd& A);
// Same quantities through a Cholesky factor of the smaller Gram matrix; A must have full rank.
HelperQuantities helper_quantities_gram(double eta, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                        const Eigen::MatrixXd& A);

// n x d pseudoinverse of eta u v^T + A assembled from the helper quantities.
Eigen::MatrixXd meyer_pseudoinverse(double eta, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                    const Eigen::MatrixXd& A);

struct BlockStat {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;  // sample variance across trials
};

// Downscaled convention: A_ij ~ N(0, rho2 / d), Z = eta u v^T with unit u, v,
// rho2 = spec.tau2 and eta^2 = spec.theta2 / c.
struct BuildingBlocks {
  BlockStat h_norm2, k_norm2, s_norm2, t_norm2, xi_over_eta, xi_over_eta_sq;
  double eta = 0.0;
  double rho2 = 0.0;
  std::size_t trials = 0;
};

struct LemmaMeans {
  double h_norm2 = 0.0;
  double k_norm2 = 0.0;
  double s_norm2 = 0.0;
  double t_norm2 = 0.0;
  double xi_over_eta = 0.0;
  double xi_over_eta_sq = 0.0;  // leading order plus the 1/max(d, n) correction when d is known
};

LemmaMeans lemma_means(double c, double rho2, double eta, std::optional<std::int64_t> max_dim = std::nullopt);

BuildingBlocks estimate_building_blocks(const ProblemSpec& spec, std::size_t trials, std::uint64_t seed,
                                        unsigned threads = 0);

struct SpectrumReport {
  double top_singular = 0.0;  // largest singular value of X
  double edge_top = 0.0;      // largest singular value of an independent bulk draw
  bool outlier_present = false;
};

SpectrumReport spectrum_check(const ProblemSpec& spec, std::uint64_t seed);

}  // namespace spikelab
