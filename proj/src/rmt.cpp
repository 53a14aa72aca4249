#include "spikelab/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "spikelab/error.hpp"
#include "spikelab/linalg.hpp"
#include "spikelab/parallel.hpp"
#include "spikelab/simulate.hpp"

namespace spikelab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kXiFloor = 1e-10;

void check_shapes(const VectorXd& u, const VectorXd& v, const MatrixXd& A) {
  if (u.size() != A.rows() || v.size() != A.cols())
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("u ({}) and v ({}) must match A ({} x {})", u.size(), v.size(), A.rows(), A.cols()));
}

void finish(HelperQuantities& q, double eta) {
  q.h_norm2 = q.h.squaredNorm();
  q.k_norm2 = q.k.squaredNorm();
  q.t_norm2 = q.t.squaredNorm();
  q.s_norm2 = q.s.squaredNorm();
  q.gamma1 = eta * eta * q.t_norm2 * q.k_norm2 + q.xi * q.xi;
  q.gamma2 = eta * eta * q.s_norm2 * q.h_norm2 + q.xi * q.xi;
}

VectorXd unit(Eigen::Index len, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  for (;;) {
    VectorXd v(len);
    for (Eigen::Index i = 0; i < len; ++i) v(i) = N(rng);
    const double nv = v.norm();
    if (nv > 0.0) return v / nv;
  }
}

BlockStat stat(const std::vector<double>& x) {
  const double T = static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += v;
  BlockStat b;
  b.mean = s / T;
  double ss = 0.0;
  for (double v : x) ss += (v - b.mean) * (v - b.mean);
  b.variance = x.size() > 1 ? ss / (T - 1.0) : 0.0;
  b.std_error = std::sqrt(b.variance / T);
  return b;
}

}  // namespace

HelperQuantities helper_quantities(double eta, const VectorXd& u, const VectorXd& v, const MatrixXd& A,
                                   const MatrixXd& Ap) {
  check_shapes(u, v, A);
  if (Ap.rows() != A.cols() || Ap.cols() != A.rows())
    throw Error(ErrorKind::DimensionMismatch, "A_pinv must be n x d");
  HelperQuantities q;
  q.h = Ap.transpose() * v;
  q.k = Ap * u;
  q.t = v - Ap * (A * v);
  q.s = u - A * q.k;
  q.xi = 1.0 + eta * v.dot(q.k);
  finish(q, eta);
  return q;
}

HelperQuantities helper_quantities(double eta, const VectorXd& u, const VectorXd& v, const MatrixXd& A) {
  check_shapes(u, v, A);
  return helper_quantities(eta, u, v, A, pseudoinverse(A));
}

HelperQuantities helper_quantities_gram(double eta, const VectorXd& u, const VectorXd& v, const MatrixXd& A) {
  check_shapes(u, v, A);
  const Eigen::Index d = A.rows(), n = A.cols();
  HelperQuantities q;
  if (d >= n) {
    MatrixXd G = MatrixXd::Zero(n, n);
    G.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
    Eigen::LLT<MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::RankDeficient, "A^T A is not positive definite");
    q.k = llt.solve(A.transpose() * u);
    q.h = A * llt.solve(v);
    q.t = VectorXd::Zero(n);
    q.s = u - A * q.k;
  } else {
    MatrixXd G = MatrixXd::Zero(d, d);
    G.selfadjointView<Eigen::Lower>().rankUpdate(A);
    Eigen::LLT<MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::RankDeficient, "A A^T is not positive definite");
    q.k = A.transpose() * llt.solve(u);
    q.h = llt.solve(A * v);
    q.t = v - A.transpose() * q.h;
    q.s = VectorXd::Zero(d);
  }
  q.xi = 1.0 + eta * v.dot(q.k);
  finish(q, eta);
  return q;
}

MatrixXd meyer_pseudoinverse(double eta, const VectorXd& u, const VectorXd& v, const MatrixXd& A) {
  check_shapes(u, v, A);
  int rank = 0;
  const MatrixXd Ap = pseudoinverse(A, &rank);
  if (rank < std::min(A.rows(), A.cols()))
    throw Error(ErrorKind::RankDeficient, fmt::format("A has rank {} < {}", rank, std::min(A.rows(), A.cols())));
  const HelperQuantities q = helper_quantities(eta, u, v, A, Ap);
  if (std::abs(q.xi) < kXiFloor)
    throw Error(ErrorKind::DegenerateXi, fmt::format("xi = {} is numerically zero", q.xi));

  const double xi = q.xi;
  MatrixXd P = Ap;
  if (A.rows() <= A.cols()) {
    const VectorXd kAp = Ap.transpose() * q.k;  // (k^T A^+)^T
    const VectorXd p1 = -(eta * eta * q.k_norm2 / xi) * q.t - eta * q.k;
    const VectorXd q1 = -(eta * q.t_norm2 / xi) * kAp - q.h;
    P.noalias() += (eta / xi) * q.t * kAp.transpose();
    P.noalias() -= (xi / q.gamma1) * p1 * q1.transpose();
  } else {
    const VectorXd Aph = Ap * q.h;
    const VectorXd p2 = -(eta * eta * q.s_norm2 / xi) * Aph - eta * q.k;
    const VectorXd q2 = -(eta * q.h_norm2 / xi) * q.s - q.h;
    P.noalias() += (eta / xi) * Aph * q.s.transpose();
    P.noalias() -= (xi / q.gamma2) * p2 * q2.transpose();
  }
  return P;
}

LemmaMeans lemma_means(double c, double rho2, double eta, std::optional<std::int64_t> max_dim) {
  const Branch b = branch_for(c);
  if (!(rho2 > 0.0)) throw Error(ErrorKind::InvalidSpec, "rho2 must be positive");
  if (!(eta > 0.0)) throw Error(ErrorKind::InvalidSpec, "eta must be positive");
  LemmaMeans m;
  if (b == Branch::Under) {
    m.h_norm2 = c * c / (rho2 * (1.0 - c));
    m.k_norm2 = c / (rho2 * (1.0 - c));
    m.s_norm2 = 0.0;
    m.t_norm2 = 1.0 - c;
  } else {
    m.h_norm2 = c / (rho2 * (c - 1.0));
    m.k_norm2 = 1.0 / (rho2 * (c - 1.0));
    m.s_norm2 = 1.0 - 1.0 / c;
    m.t_norm2 = 0.0;
  }
  m.xi_over_eta = 1.0 / eta;
  m.xi_over_eta_sq = 1.0 / (eta * eta);
  if (max_dim) m.xi_over_eta_sq += c / (static_cast<double>(*max_dim) * rho2 * std::abs(1.0 - c));
  return m;
}

BuildingBlocks estimate_building_blocks(const ProblemSpec& spec, std::size_t trials, std::uint64_t seed,
                                        unsigned threads) {
  if (!spec.has_dimensions()) throw Error(ErrorKind::InvalidSpec, "building blocks need d and n");
  if (trials < 2) throw Error(ErrorKind::InvalidSpec, "building blocks need at least two trials");
  try {
    branch_for(spec.c);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidSpec, e.what());
  }
  if (!(spec.theta2 > 0.0) || std::isinf(spec.theta2))
    throw Error(ErrorKind::InvalidSpec, "building blocks need a finite positive spike strength");

  const Eigen::Index d = *spec.d, n = *spec.n;
  const double rho2 = spec.tau2;
  const double eta = std::sqrt(spec.theta2 / spec.c);
  const double scale = std::sqrt(rho2 / static_cast<double>(d));

  std::vector<double> h(trials), k(trials), s(trials), t(trials), x(trials), x2(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    std::normal_distribution<double> N(0.0, 1.0);
    const VectorXd u = unit(d, rng);
    const VectorXd v = unit(n, rng);
    MatrixXd A(d, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index r = 0; r < d; ++r) A(r, j) = scale * N(rng);
    const HelperQuantities q = helper_quantities_gram(eta, u, v, A);
    h[i] = q.h_norm2;
    k[i] = q.k_norm2;
    s[i] = q.s_norm2;
    t[i] = q.t_norm2;
    x[i] = q.xi / eta;
    x2[i] = x[i] * x[i];
  });

  BuildingBlocks out;
  out.h_norm2 = stat(h);
  out.k_norm2 = stat(k);
  out.s_norm2 = stat(s);
  out.t_norm2 = stat(t);
  out.xi_over_eta = stat(x);
  out.xi_over_eta_sq = stat(x2);
  out.eta = eta;
  out.rho2 = rho2;
  out.trials = trials;
  return out;
}

SpectrumReport spectrum_check(const ProblemSpec& spec, std::uint64_t seed) {
  if (!spec.has_dimensions()) throw Error(ErrorKind::MissingDimension, "spectrum check needs d and n");
  const Dataset ds = sample_dataset(spec, derive_seed(seed, 0));
  ProblemSpec bulk = spec;
  bulk.theta2 = 0.0;
  const Dataset ref = sample_dataset(bulk, derive_seed(seed, 1));
  SpectrumReport r;
  r.top_singular = top_singular_value(ds.X);
  r.edge_top = top_singular_value(ref.A);
  r.outlier_present = r.top_singular > 1.05 * r.edge_top;
  return r;
}

}  // namespace spikelab
