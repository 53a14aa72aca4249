#include "spikelab/theory.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "spikelab/error.hpp"

namespace spikelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RiskDecomposition assemble(double bias, double var, double dn, double al, double tau_eps2_test) {
  RiskDecomposition r;
  r.bias = bias;
  r.variance = var;
  r.data_noise = dn;
  r.target_alignment = al;
  r.excess = bias + var + dn + al;
  r.total = r.excess + tau_eps2_test;
  return r;
}

// theta2 -> infinity with theta2_test / theta2 fixed.
RiskDecomposition frobenius_limit(const ProblemSpec& s, Branch branch) {
  const double c = s.c, a = s.beta_norm2, b = s.align2;
  const double t2 = s.tau2, tt2 = s.tau2_test, te = s.tau_eps2;
  const double az = s.alpha_z, aa = s.alpha_a, aat = s.alpha_a_test;
  const double dz = s.alpha_z_test - az;
  const double bias = (dz != 0.0 && b > 0.0) ? kInf : 0.0;
  double var, al;
  if (branch == Branch::Over) {
    const double dc = az - aa / c;
    var = tt2 * (a * aa * aa / c + b * c / (c - 1.0) * dc * dc + te / (t2 * (c - 1.0)));
    al = -2.0 * aat * tt2 * (aa * a / c + dc * b);
  } else {
    const double d1 = az - aa;
    var = tt2 * (aa * aa * a + b * (d1 * d1 / (1.0 - c) + 2.0 * aa * d1) + te * c / (t2 * (1.0 - c)));
    al = -2.0 * aat * tt2 * (aa * a + d1 * b);
  }
  return assemble(bias, var, aat * aat * tt2 * a, al, s.tau_eps2_test);
}

}  // namespace

MisspecIntermediates misspec_intermediates(double alpha_z, double alpha_a, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidSpec, "c must be positive");
  return {alpha_z - alpha_a / c, alpha_z - alpha_a};
}

RiskDecomposition risk_general(const ProblemSpec& s, Branch branch, bool finite_d) {
  check_branch(s.c, branch);
  if (finite_d && !s.d)
    throw Error(ErrorKind::MissingDimension, "finite-d risk needs the dimension d");
  if (!finite_d && s.is_frobenius()) return frobenius_limit(s, branch);
  if (std::isinf(s.theta2) || std::isinf(s.theta2_test))
    throw Error(ErrorKind::InvalidSpec, "infinite spike strength needs the asymptotic Frobenius path");

  const double inv_d = finite_d ? 1.0 / static_cast<double>(*s.d) : 0.0;
  const double c = s.c, a = s.beta_norm2, b = s.align2;
  const double th2 = s.theta2, tth2 = s.theta2_test;
  const double t2 = s.tau2, tt2 = s.tau2_test, te = s.tau_eps2;
  const double az = s.alpha_z, aa = s.alpha_a, aat = s.alpha_a_test;
  const double dz = s.alpha_z_test - az;

  double bias, var, al;
  if (branch == Branch::Over) {
    const double dc = az - aa / c;
    const double wc = th2 / (th2 + c * t2);
    const double shrink = dz + c * t2 / (th2 + c * t2) * dc;
    const double q = th2 / c + t2;
    bias = tth2 * (b * shrink * shrink +
                   aa * aa * a * inv_d * ((c - 1.0) / c) * (th2 / c * t2) / (q * q) +
                   te * inv_d / (c - 1.0) * (th2 + t2) / (q * q));
    var = tt2 * (a * (aa * aa / c - aa * aa * inv_d * wc) + b * c / (c - 1.0) * wc * dc * dc +
                 te * (1.0 / (t2 * (c - 1.0)) - inv_d * th2 / (t2 * (th2 + c * t2)) * c / (c - 1.0)));
    al = -2.0 * aat * tt2 * (aa / c * a - aa * inv_d * wc * a + dc * wc * b);
  } else {
    const double d1 = az - aa;
    const double w1 = th2 / (th2 + t2);
    const double shrink = dz + t2 / (th2 + t2) * d1;
    bias = tth2 * (shrink * shrink * b + te * inv_d * c / (1.0 - c) / (th2 + t2));
    var = tt2 * (aa * aa * a +
                 b * (d1 * d1 * th2 * (th2 + c * t2) / ((th2 + t2) * (th2 + t2) * (1.0 - c)) +
                      2.0 * aa * d1 * w1) +
                 te * (c / ((1.0 - c) * t2) - inv_d * th2 / (t2 * (th2 + t2)) * c / (1.0 - c)));
    al = -2.0 * aat * tt2 * (aa * a + d1 * b * w1);
  }
  return assemble(bias, var, aat * aat * tt2 * a, al, s.tau_eps2_test);
}

RiskDecomposition risk_general(const ProblemSpec& spec, bool finite_d) {
  return risk_general(spec, branch_for(spec.c), finite_d);
}

namespace {

void require_same_test_distribution(const ProblemSpec& s) {
  if (s.theta2_test != s.theta2 || s.tau2_test != s.tau2)
    throw Error(ErrorKind::SpecMismatch, "test-side theta2/tau2 must equal the training side");
}

}  // namespace

double risk_well_specified(const ProblemSpec& s, Branch branch) {
  check_branch(s.c, branch);
  if (!(s.alpha_z == s.alpha_a && s.alpha_z_test == s.alpha_z && s.alpha_a_test == s.alpha_a))
    throw Error(ErrorKind::SpecMismatch,
                "well-specified risk needs alpha_z = alpha_a on both train and test sides");
  require_same_test_distribution(s);
  const double c = s.c, a = s.beta_norm2, b = s.align2, t2 = s.tau2, te = s.tau_eps2;
  if (branch == Branch::Under) return te * c / (1.0 - c);

  const double alpha2 = s.alpha_z * s.alpha_z;
  double coef;
  if (auto g = s.gamma()) {
    const double gm = *g;
    coef = (gm * c * c - 2.0 * gm * c - gm * gm) / ((gm + c) * (gm + c));
  } else if (s.is_frobenius() && !s.d) {
    coef = -1.0;
  } else {
    const double th2 = s.theta2;
    coef = (th2 * t2 * c * c - 2.0 * th2 * t2 * c - th2 * th2) / ((th2 + t2 * c) * (th2 + t2 * c));
  }
  return te / (c - 1.0) + alpha2 * t2 * (1.0 - 1.0 / c) * (a + b * coef);
}

double risk_misspecified(const ProblemSpec& s, Branch branch) {
  check_branch(s.c, branch);
  if (s.alpha_z_test != s.alpha_z || s.alpha_a_test != s.alpha_a)
    throw Error(ErrorKind::SpecMismatch, "misspecified risk needs test-side alphas equal to training");
  require_same_test_distribution(s);
  const double c = s.c, a = s.beta_norm2, b = s.align2, t2 = s.tau2, te = s.tau_eps2;
  const double aa = s.alpha_a;
  const auto [dc, d1] = misspec_intermediates(s.alpha_z, s.alpha_a, c);

  // Spike weight and the (theta2 + tau2 c^2)/(theta2 + tau2 c) factor, per scaling.
  double w, ratio;
  if (s.is_frobenius() && !s.d) {
    w = 1.0;
    ratio = 1.0;
  } else if (auto g = s.gamma()) {
    w = branch == Branch::Over ? *g / (*g + c) : *g / (*g + 1.0);
    ratio = (c * c + *g) / (*g + c);
  } else {
    const double th2 = s.theta2;
    w = branch == Branch::Over ? th2 / (th2 + t2 * c) : th2 / (th2 + t2);
    ratio = (th2 + t2 * c * c) / (th2 + t2 * c);
  }

  if (branch == Branch::Under) return te * c / (1.0 - c) + t2 * b * d1 * d1 / (1.0 - c) * w;
  return te / (c - 1.0) + aa * aa * t2 * a * (1.0 - 1.0 / c) +
         t2 * b * w * (dc * dc * c / (c - 1.0) * ratio - 2.0 * aa * dc);
}

double risk_spike_recovery(const ProblemSpec& s, Branch branch) {
  check_branch(s.c, branch);
  if (s.alpha_a != 0.0 || s.alpha_a_test != 0.0)
    throw Error(ErrorKind::SpecMismatch, "spike recovery needs alpha_a = 0 on both sides");
  if (s.alpha_z_test != s.alpha_z)
    throw Error(ErrorKind::SpecMismatch, "spike recovery needs alpha_z_test = alpha_z");
  require_same_test_distribution(s);
  const double c = s.c, b = s.align2, t2 = s.tau2, te = s.tau_eps2;
  const double az2 = s.alpha_z * s.alpha_z;

  if (s.is_frobenius() && !s.d) {
    if (branch == Branch::Under) return az2 * t2 * b / (1.0 - c) + c / (1.0 - c) * te;
    return c * az2 * t2 * b / (c - 1.0) + te / (c - 1.0);
  }
  const double gm = s.gamma() ? *s.gamma() : s.theta2 / t2;
  if (branch == Branch::Under)
    return gm * az2 * t2 / ((1.0 - c) * (gm + 1.0)) * b + c / (1.0 - c) * te;
  return gm * c * (c * c + gm) * az2 * t2 / ((c - 1.0) * (gm + c) * (gm + c)) * b + te / (c - 1.0);
}

double alignment_coefficient(const ProblemSpec& spec, Branch branch, bool finite_d) {
  ProblemSpec aligned = spec, orth = spec;
  aligned.align2 = spec.beta_norm2;
  orth.align2 = 0.0;
  return risk_general(aligned, branch, finite_d).total - risk_general(orth, branch, finite_d).total;
}

double alignment_coefficient(const ProblemSpec& spec, bool finite_d) {
  return alignment_coefficient(spec, branch_for(spec.c), finite_d);
}

double c_star() {
  auto f = [](double c) { return c * (c - 2.0) - (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c)); };
  double lo = 1.0 + kGuardBand, hi = 100.0;
  double flo = f(lo);
  if (flo * f(hi) > 0.0) throw Error(ErrorKind::DecompositionFailure, "c_star bracket has no sign change");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double bbp_threshold(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw Error(ErrorKind::InvalidSpec, fmt::format("c must be positive (got {})", c));
  const double r = 1.0 + std::sqrt(c);
  return r * r;
}

double check_phi_positivity(double alpha_z, double alpha_a, double align2, double beta_norm2,
                            double phi) {
  if (!(phi > 0.0)) throw Error(ErrorKind::InvalidSpec, "phi must be positive");
  const double v = alpha_a * alpha_a * beta_norm2 +
                   (alpha_z * alpha_z * (1.0 + 1.0 / phi) - 2.0 * alpha_z * alpha_a) * align2;
  if (!(v > 0.0))
    throw Error(ErrorKind::UnsupportedSetting,
                fmt::format("limit expression {} is not positive for phi = {}", v, phi));
  return v;
}

}  // namespace spikelab
