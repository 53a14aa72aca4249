#include "spikelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikelab/error.hpp"

namespace spikelab {

namespace {

FitResult svd_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw Error(ErrorKind::DecompositionFailure, "SVD did not converge");
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  if (!(smax > 0.0)) throw Error(ErrorKind::DecompositionFailure, "X has no nonzero singular value");
  const double cutoff = static_cast<double>(std::max(X.rows(), X.cols())) *
                        std::numeric_limits<double>::epsilon() * smax;
  int rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  const auto U = svd.matrixU().leftCols(rank);
  const auto V = svd.matrixV().leftCols(rank);
  Eigen::VectorXd coef = V.transpose() * y;
  coef.array() /= s.head(rank).array();
  FitResult r;
  r.beta_int = U * coef;
  r.rank_used = rank;
  r.sv_cutoff = cutoff;
  return r;
}

}  // namespace

FitResult min_norm_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, FitMethod method) {
  if (X.cols() != y.size())
    throw Error(ErrorKind::DimensionMismatch, "y must have one entry per column of X");
  if (X.size() == 0) throw Error(ErrorKind::DecompositionFailure, "X is empty");
  if (method == FitMethod::Svd) return svd_fit(X, y);

  const Eigen::Index d = X.rows(), n = X.cols();
  FitResult r;
  r.rank_used = static_cast<int>(std::min(d, n));
  if (d >= n) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    G.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) return svd_fit(X, y);
    r.beta_int = X * llt.solve(y);
  } else {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
    G.selfadjointView<Eigen::Lower>().rankUpdate(X);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) return svd_fit(X, y);
    r.beta_int = llt.solve(X * y);
  }
  if (!r.beta_int.allFinite()) return svd_fit(X, y);
  return r;
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& M, int* rank) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw Error(ErrorKind::DecompositionFailure, "SVD did not converge");
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = static_cast<double>(std::max(M.rows(), M.cols())) *
                        std::numeric_limits<double>::epsilon() * smax;
  int r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  if (rank) *rank = r;
  const auto U = svd.matrixU().leftCols(r);
  const auto V = svd.matrixV().leftCols(r);
  return V * s.head(r).cwiseInverse().asDiagonal() * U.transpose();
}

double top_singular_value(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::MatrixXd G;
  if (M.rows() >= M.cols()) {
    G = Eigen::MatrixXd::Zero(M.cols(), M.cols());
    G.selfadjointView<Eigen::Lower>().rankUpdate(M.transpose());
  } else {
    G = Eigen::MatrixXd::Zero(M.rows(), M.rows());
    G.selfadjointView<Eigen::Lower>().rankUpdate(M);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::DecompositionFailure, "eigensolver did not converge");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace spikelab
