#include "spikelab/model.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "spikelab/error.hpp"

namespace spikelab {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::InvalidSpec, msg);
}

void require_finite(double v, const char* name) {
  require(std::isfinite(v), fmt::format("{} must be finite (got {})", name, v));
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  require(v > 0.0, fmt::format("{} must be positive (got {})", name, v));
}

void require_nonnegative(double v, const char* name) {
  require_finite(v, name);
  require(v >= 0.0, fmt::format("{} must be non-negative (got {})", name, v));
}

}  // namespace

std::string_view to_string(Branch b) { return b == Branch::Under ? "under" : "over"; }

std::string describe(const ScalingRegime& s) {
  if (auto* op = std::get_if<OperatorNorm>(&s)) return fmt::format("operator(gamma={})", op->gamma);
  if (std::holds_alternative<FrobeniusNorm>(s)) return "frobenius";
  return fmt::format("explicit(theta2={})", std::get<ExplicitSpike>(s).theta2);
}

std::optional<double> ProblemSpec::gamma() const {
  if (auto* op = std::get_if<OperatorNorm>(&scaling)) return op->gamma;
  return std::nullopt;
}

Branch branch_for(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw Error(ErrorKind::InvalidSpec, fmt::format("c must be positive and finite (got {})", c));
  if (std::abs(c - 1.0) <= kGuardBand)
    throw Error(ErrorKind::GuardBand,
                fmt::format("c = {} lies within {} of 1; no branch applies", c, kGuardBand));
  return c < 1.0 ? Branch::Under : Branch::Over;
}

void check_branch(double c, Branch b) {
  if (branch_for(c) != b)
    throw Error(ErrorKind::SpecMismatch,
                fmt::format("branch '{}' requested but c = {} selects '{}'", to_string(b), c,
                            to_string(branch_for(c))));
}

ProblemSpec resolve_spec(const SpecInput& in) {
  ProblemSpec out;

  if (in.d && in.n) {
    require(*in.d >= 1 && *in.n >= 1, "d and n must be at least 1");
    double ratio = static_cast<double>(*in.d) / static_cast<double>(*in.n);
    if (in.c) {
      require_positive(*in.c, "c");
      require(std::abs(*in.c - ratio) <= 1e-12 * std::max(1.0, ratio),
              fmt::format("c = {} disagrees with d/n = {}", *in.c, ratio));
    }
    out.d = in.d;
    out.n = in.n;
    out.c = ratio;
  } else if (in.d || in.n) {
    require(in.c.has_value(), "supply both d and n, or one of them together with c");
    require_positive(*in.c, "c");
    if (in.d) {
      require(*in.d >= 1, "d must be at least 1");
      auto n = static_cast<std::int64_t>(std::llround(static_cast<double>(*in.d) / *in.c));
      require(n >= 1, "d / c rounds to n < 1");
      out.d = in.d;
      out.n = n;
    } else {
      require(*in.n >= 1, "n must be at least 1");
      auto d = static_cast<std::int64_t>(std::llround(static_cast<double>(*in.n) * *in.c));
      require(d >= 1, "n * c rounds to d < 1");
      out.d = d;
      out.n = in.n;
    }
    out.c = static_cast<double>(*out.d) / static_cast<double>(*out.n);
  } else {
    require(in.c.has_value(), "one of c or (d, n) is required");
    require_positive(*in.c, "c");
    out.c = *in.c;
  }

  require_positive(in.tau2, "tau2");
  require_nonnegative(in.tau_eps2, "tau_eps2");
  out.tau2 = in.tau2;
  out.tau_eps2 = in.tau_eps2;
  out.tau2_test = in.tau2_test.value_or(in.tau2);
  require_positive(out.tau2_test, "tau2_test");
  out.tau_eps2_test = in.tau_eps2_test.value_or(in.tau_eps2);
  require_nonnegative(out.tau_eps2_test, "tau_eps2_test");

  out.scaling = in.scaling;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (auto* op = std::get_if<OperatorNorm>(&in.scaling)) {
    require_nonnegative(op->gamma, "gamma");
    out.theta2 = op->gamma * out.tau2;
    out.theta2_test = in.theta2_test.value_or(op->gamma * out.tau2_test);
  } else if (std::holds_alternative<FrobeniusNorm>(in.scaling)) {
    require(!in.theta2_test.has_value(),
            "theta2_test cannot be set under Frobenius scaling; it follows d * tau2_test");
    if (out.d) {
      out.theta2 = static_cast<double>(*out.d) * out.tau2;
      out.theta2_test = static_cast<double>(*out.d) * out.tau2_test;
    } else {
      out.theta2 = inf;
      out.theta2_test = inf;
    }
  } else {
    double t2 = std::get<ExplicitSpike>(in.scaling).theta2;
    require_nonnegative(t2, "theta2");
    out.theta2 = t2;
    out.theta2_test = in.theta2_test.value_or(t2);
  }
  if (!std::isinf(out.theta2_test)) require_nonnegative(out.theta2_test, "theta2_test");

  require_finite(in.alpha_z, "alpha_z");
  require_finite(in.alpha_a, "alpha_a");
  out.alpha_z = in.alpha_z;
  out.alpha_a = in.alpha_a;
  out.alpha_z_test = in.alpha_z_test.value_or(in.alpha_z);
  out.alpha_a_test = in.alpha_a_test.value_or(in.alpha_a);
  require_finite(out.alpha_z_test, "alpha_z_test");
  require_finite(out.alpha_a_test, "alpha_a_test");

  require_positive(in.beta_norm2, "beta_norm2");
  require_nonnegative(in.align2, "align2");
  require(in.align2 <= in.beta_norm2 * (1.0 + 1e-12),
          fmt::format("align2 = {} exceeds beta_norm2 = {}", in.align2, in.beta_norm2));
  out.beta_norm2 = in.beta_norm2;
  out.align2 = std::min(in.align2, in.beta_norm2);
  return out;
}

SpecInput to_input(const ProblemSpec& spec) {
  SpecInput in;
  in.d = spec.d;
  in.n = spec.n;
  if (!spec.has_dimensions()) in.c = spec.c;
  in.scaling = spec.scaling;
  in.tau2 = spec.tau2;
  in.tau_eps2 = spec.tau_eps2;
  if (!spec.is_frobenius()) in.theta2_test = spec.theta2_test;
  in.tau2_test = spec.tau2_test;
  in.tau_eps2_test = spec.tau_eps2_test;
  in.alpha_z = spec.alpha_z;
  in.alpha_a = spec.alpha_a;
  in.alpha_z_test = spec.alpha_z_test;
  in.alpha_a_test = spec.alpha_a_test;
  in.beta_norm2 = spec.beta_norm2;
  in.align2 = spec.align2;
  return in;
}

ProblemSpec resolve_spec(const ProblemSpec& spec) { return resolve_spec(to_input(spec)); }

}  // namespace spikelab
