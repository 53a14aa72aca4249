#pragma once

#include <Eigen/Dense>

namespace spikelab {

struct FitResult {
  Eigen::VectorXd beta_int;
  int rank_used = 0;
  double sv_cutoff = 0.0;  // zero for the Gram route, which assumes full rank
};

enum class FitMethod {
  Svd,   // thin SVD with relative singular-value cutoff
  Gram,  // Cholesky on the smaller Gram matrix, SVD fallback when not positive definite
};

// Minimum-norm solution of X^T beta = y, i.e. beta = (X^T)^+ y, for X of size d x n.
FitResult min_norm_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, FitMethod method = FitMethod::Svd);

// Moore-Penrose pseudoinverse; singular values below max(rows, cols) * eps * sigma_max are dropped.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& M, int* rank = nullptr);

// Largest singular value.
double top_singular_value(const Eigen::MatrixXd& M);

}  // namespace spikelab
