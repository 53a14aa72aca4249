#include "spikelab/simulate.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "spikelab/error.hpp"
#include "spikelab/parallel.hpp"

namespace spikelab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd gaussian_vector(Eigen::Index len, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  VectorXd v(len);
  for (Eigen::Index i = 0; i < len; ++i) v(i) = N(rng);
  return v;
}

VectorXd unit_vector(Eigen::Index len, std::mt19937_64& rng) {
  for (;;) {
    VectorXd v = gaussian_vector(len, rng);
    const double nv = v.norm();
    if (nv > 0.0) return v / nv;
  }
}

void require_dimensions(const ProblemSpec& spec) {
  if (!spec.has_dimensions()) throw Error(ErrorKind::MissingDimension, "sampling needs d and n");
  if (*spec.d < 2) throw Error(ErrorKind::InvalidSpec, "sampling needs d >= 2");
}

constexpr std::uint64_t kFixedUStream = std::numeric_limits<std::uint64_t>::max();

}  // namespace

Dataset sample_dataset(const ProblemSpec& spec, std::uint64_t seed, const VectorXd* fixed_u) {
  require_dimensions(spec);
  const Eigen::Index d = *spec.d, n = *spec.n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);

  Dataset ds;
  ds.seed = seed;
  if (fixed_u) {
    if (fixed_u->size() != d) throw Error(ErrorKind::DimensionMismatch, "fixed u must have length d");
    ds.u = fixed_u->normalized();
  } else {
    ds.u = unit_vector(d, rng);
  }

  // r uniform on the unit sphere of u's orthogonal complement.
  VectorXd r;
  for (;;) {
    r = gaussian_vector(d, rng);
    r -= r.dot(ds.u) * ds.u;
    const double nr = r.norm();
    if (nr > 1e-8) {
      r /= nr;
      break;
    }
  }
  const double kappa = std::sqrt(spec.align2);
  ds.beta_star = kappa * ds.u + std::sqrt(std::max(0.0, spec.beta_norm2 - spec.align2)) * r;

  ds.w = gaussian_vector(n, rng);
  const double tau = std::sqrt(spec.tau2);
  ds.A.resize(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) ds.A(i, j) = tau * N(rng);
  const double theta = std::sqrt(spec.theta2);
  ds.X = ds.A;
  if (theta != 0.0) ds.X.noalias() += (theta * ds.u) * ds.w.transpose();

  const double noise = std::sqrt(spec.tau_eps2);
  VectorXd eps(n);
  for (Eigen::Index i = 0; i < n; ++i) eps(i) = noise * N(rng);
  ds.y = (spec.alpha_z * theta * ds.u.dot(ds.beta_star)) * ds.w;
  ds.y.noalias() += spec.alpha_a * (ds.A.transpose() * ds.beta_star);
  ds.y += eps;
  return ds;
}

RiskDecomposition conditional_risk(const VectorXd& beta_int, const VectorXd& beta_star, const VectorXd& u,
                                   const ProblemSpec& spec) {
  if (beta_int.size() != beta_star.size() || u.size() != beta_star.size())
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("beta_int ({}), beta_star ({}) and u ({}) must have equal length", beta_int.size(),
                            beta_star.size(), u.size()));
  if (spec.d && *spec.d != beta_int.size())
    throw Error(ErrorKind::DimensionMismatch, "vector length differs from spec.d");
  const double proj = u.dot(spec.alpha_z_test * beta_star - beta_int);
  RiskDecomposition r;
  r.bias = spec.theta2_test * proj * proj;
  r.variance = spec.tau2_test * beta_int.squaredNorm();
  r.data_noise = spec.alpha_a_test * spec.alpha_a_test * spec.tau2_test * beta_star.squaredNorm();
  r.target_alignment = -2.0 * spec.alpha_a_test * spec.tau2_test * beta_star.dot(beta_int);
  r.excess = r.bias + r.variance + r.data_noise + r.target_alignment;
  r.total = r.excess + spec.tau_eps2_test;
  return r;
}

RiskDecomposition conditional_risk(const Dataset& data, const VectorXd& beta_int, const ProblemSpec& spec) {
  return conditional_risk(beta_int, data.beta_star, data.u, spec);
}

SampledRisk sampled_test_risk(const Dataset& data, const VectorXd& beta_int, const ProblemSpec& spec,
                              std::size_t points, std::uint64_t seed) {
  if (points < 2) throw Error(ErrorKind::InvalidSpec, "need at least two test points");
  if (beta_int.size() != data.u.size()) throw Error(ErrorKind::DimensionMismatch, "beta_int length differs from d");
  const Eigen::Index d = data.u.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const double theta_t = std::sqrt(spec.theta2_test), tau_t = std::sqrt(spec.tau2_test);
  const double noise_t = std::sqrt(spec.tau_eps2_test);
  const double spike_target = spec.alpha_z_test * theta_t * data.u.dot(data.beta_star);
  const double spike_fit = theta_t * data.u.dot(beta_int);

  double sum = 0.0, sum2 = 0.0;
  VectorXd a(d);
  for (std::size_t k = 0; k < points; ++k) {
    const double z = N(rng);
    for (Eigen::Index i = 0; i < d; ++i) a(i) = tau_t * N(rng);
    const double y = spike_target * z + spec.alpha_a_test * a.dot(data.beta_star) + noise_t * N(rng);
    const double pred = spike_fit * z + a.dot(beta_int);
    const double e2 = (y - pred) * (y - pred);
    sum += e2;
    sum2 += e2 * e2;
  }
  const double m = sum / static_cast<double>(points);
  const double var = (sum2 - static_cast<double>(points) * m * m) / static_cast<double>(points - 1);
  return {m, std::sqrt(std::max(0.0, var) / static_cast<double>(points)), points};
}

MCEstimate monte_carlo_risk(const ProblemSpec& spec, std::size_t trials, std::uint64_t master_seed,
                            const MCOptions& options) {
  if (trials < 2) throw Error(ErrorKind::InvalidSpec, "monte carlo needs at least two trials");
  require_dimensions(spec);

  VectorXd fixed_u;
  if (options.fixed_u) {
    std::mt19937_64 rng(derive_seed(master_seed, kFixedUStream));
    fixed_u = unit_vector(*spec.d, rng);
  }
  const bool over = *spec.d > *spec.n;

  std::vector<RiskDecomposition> results(trials);
  std::vector<double> residuals(trials, 0.0);
  parallel_for(trials, options.threads, [&](std::size_t t) {
    const Dataset ds = sample_dataset(spec, derive_seed(master_seed, t), options.fixed_u ? &fixed_u : nullptr);
    FitResult fit = min_norm_fit(ds.X, ds.y, options.method);
    if (over) {
      const double ny = ds.y.norm();
      double res = (ds.y - ds.X.transpose() * fit.beta_int).norm() / ny;
      if (res > 1e-8 && options.method != FitMethod::Svd) {
        fit = min_norm_fit(ds.X, ds.y, FitMethod::Svd);
        res = (ds.y - ds.X.transpose() * fit.beta_int).norm() / ny;
      }
      if (res > 1e-8)
        throw Error(ErrorKind::DecompositionFailure,
                    fmt::format("trial {} does not interpolate (relative residual {})", t, res));
      residuals[t] = res;
    }
    results[t] = conditional_risk(ds, fit.beta_int, spec);
  });

  // Sequential reduction in trial order.
  const double T = static_cast<double>(trials);
  auto field_stats = [&](double RiskDecomposition::*f, double& mean, double& se) {
    double s = 0.0;
    for (const auto& r : results) s += r.*f;
    mean = s / T;
    double ss = 0.0;
    for (const auto& r : results) ss += (r.*f - mean) * (r.*f - mean);
    se = std::sqrt(ss / (T - 1.0) / T);
  };
  MCEstimate est;
  est.trials = trials;
  field_stats(&RiskDecomposition::bias, est.per_term.bias, est.per_term_stderr.bias);
  field_stats(&RiskDecomposition::variance, est.per_term.variance, est.per_term_stderr.variance);
  field_stats(&RiskDecomposition::data_noise, est.per_term.data_noise, est.per_term_stderr.data_noise);
  field_stats(&RiskDecomposition::target_alignment, est.per_term.target_alignment,
              est.per_term_stderr.target_alignment);
  field_stats(&RiskDecomposition::excess, est.per_term.excess, est.per_term_stderr.excess);
  field_stats(&RiskDecomposition::total, est.per_term.total, est.per_term_stderr.total);
  est.mean = est.per_term.excess;
  est.std_error = est.per_term_stderr.excess;
  for (double r : residuals) est.max_relative_residual = std::max(est.max_relative_residual, r);
  return est;
}

}  // namespace spikelab
