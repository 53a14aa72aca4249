#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "spikelab/error.hpp"
#include "spikelab/model.hpp"
#include "spikelab/theory.hpp"

using namespace spikelab;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidSpec;
}

}  // namespace

TEST_CASE("operator scaling resolves theta2 = gamma tau2") {
  SpecInput in;
  in.d = 100;
  in.n = 50;
  in.tau2 = 1.0;
  in.scaling = OperatorNorm{2.0};
  const ProblemSpec s = resolve_spec(in);
  CHECK(s.c == 2.0);
  CHECK(s.theta2 == 2.0);
  CHECK(s.theta2_test == 2.0);
  CHECK(s.gamma().value() == 2.0);
}

TEST_CASE("frobenius scaling resolves theta2 = d tau2") {
  SpecInput in;
  in.d = 100;
  in.n = 50;
  in.tau2 = 1.0;
  in.scaling = FrobeniusNorm{};
  const ProblemSpec s = resolve_spec(in);
  CHECK(s.theta2 == 100.0);
  CHECK(s.theta2_test == 100.0);

  SpecInput asym;
  asym.c = 3.0;
  asym.scaling = FrobeniusNorm{};
  CHECK(std::isinf(resolve_spec(asym).theta2));
}

TEST_CASE("frobenius test spike follows the test bulk") {
  SpecInput in;
  in.d = 10;
  in.n = 5;
  in.tau2 = 2.0;
  in.tau2_test = 3.0;
  in.scaling = FrobeniusNorm{};
  const ProblemSpec s = resolve_spec(in);
  CHECK(s.theta2 == 20.0);
  CHECK(s.theta2_test == 30.0);
  in.theta2_test = 1.0;
  CHECK(kind_of([&] { resolve_spec(in); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("Cauchy-Schwarz violation is rejected") {
  SpecInput in;
  in.c = 2.0;
  in.beta_norm2 = 1.0;
  in.align2 = 1.5;
  CHECK(kind_of([&] { resolve_spec(in); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("invalid variances and dimensions are rejected") {
  auto bad = [](auto mutate) {
    SpecInput in;
    in.c = 2.0;
    mutate(in);
    return kind_of([&] { resolve_spec(in); });
  };
  CHECK(bad([](SpecInput& s) { s.tau2 = 0.0; }) == ErrorKind::InvalidSpec);
  CHECK(bad([](SpecInput& s) { s.tau_eps2 = -1.0; }) == ErrorKind::InvalidSpec);
  CHECK(bad([](SpecInput& s) { s.tau2_test = -1.0; }) == ErrorKind::InvalidSpec);
  CHECK(bad([](SpecInput& s) { s.scaling = ExplicitSpike{-1.0}; }) == ErrorKind::InvalidSpec);
  CHECK(bad([](SpecInput& s) { s.scaling = OperatorNorm{-1.0}; }) == ErrorKind::InvalidSpec);
  CHECK(bad([](SpecInput& s) { s.c = -2.0; }) == ErrorKind::InvalidSpec);
  CHECK(bad([](SpecInput& s) { s.beta_norm2 = 0.0; }) == ErrorKind::InvalidSpec);
  CHECK(bad([](SpecInput& s) {
          s.c.reset();
          s.d = 10;
        }) == ErrorKind::InvalidSpec);
  CHECK(bad([](SpecInput& s) {
          s.d = 10;
          s.n = 4;
        }) == ErrorKind::InvalidSpec);
  CHECK(bad([](SpecInput& s) { s.alpha_z = std::numeric_limits<double>::quiet_NaN(); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("c is derived from the dimensions") {
  SpecInput in;
  in.d = 1000;
  in.c = 3.0;
  const ProblemSpec s = resolve_spec(in);
  CHECK(*s.n == 333);
  CHECK(s.c == 1000.0 / 333.0);
  SpecInput m;
  m.n = 40;
  m.c = 0.5;
  CHECK(*resolve_spec(m).d == 20);
}

TEST_CASE("test-side fields default to the training side") {
  SpecInput in;
  in.c = 2.0;
  in.scaling = ExplicitSpike{3.0};
  in.tau2 = 2.0;
  in.tau_eps2 = 0.5;
  in.alpha_z = 1.5;
  in.alpha_a = -0.5;
  const ProblemSpec s = resolve_spec(in);
  CHECK(s.theta2_test == 3.0);
  CHECK(s.tau2_test == 2.0);
  CHECK(s.tau_eps2_test == 0.5);
  CHECK(s.alpha_z_test == 1.5);
  CHECK(s.alpha_a_test == -0.5);
}

TEST_CASE("resolve_spec is idempotent") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    SpecInput in;
    if (i % 3 == 0) {
      in.d = 10 + static_cast<std::int64_t>(U(rng) * 500);
      in.n = 10 + static_cast<std::int64_t>(U(rng) * 500);
    } else {
      in.c = 0.1 + 10.0 * U(rng);
    }
    switch (i % 3) {
      case 0: in.scaling = FrobeniusNorm{}; break;
      case 1: in.scaling = OperatorNorm{5.0 * U(rng)}; break;
      default: in.scaling = ExplicitSpike{5.0 * U(rng)}; break;
    }
    in.tau2 = 0.1 + U(rng);
    in.tau_eps2 = U(rng);
    if (i % 2) in.tau2_test = 0.1 + U(rng);
    in.alpha_z = U(rng) * 3 - 1;
    in.alpha_a = U(rng) * 3 - 1;
    if (i % 4 == 1) in.alpha_z_test = U(rng);
    in.beta_norm2 = 0.5 + U(rng);
    in.align2 = in.beta_norm2 * U(rng);
    const ProblemSpec once = resolve_spec(in);
    CHECK(resolve_spec(once) == once);
  }
}

TEST_CASE("BBP placement is exact for operator scaling") {
  for (double c : {0.3, 1.5, 2.0, 7.0}) {
    SpecInput in;
    in.c = c;
    in.tau2 = 0.7;
    in.scaling = OperatorNorm{bbp_threshold(c)};
    const ProblemSpec s = resolve_spec(in);
    const double r = (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
    CHECK(std::abs(s.theta2 / s.tau2 - r) <= 4 * std::numeric_limits<double>::epsilon() * r);
  }
}

TEST_CASE("branch guard band") {
  CHECK(branch_for(0.5) == Branch::Under);
  CHECK(branch_for(1.002) == Branch::Over);
  CHECK(kind_of([] { branch_for(1.0); }) == ErrorKind::GuardBand);
  CHECK(kind_of([] { branch_for(0.9995); }) == ErrorKind::GuardBand);
  CHECK(kind_of([] { check_branch(2.0, Branch::Under); }) == ErrorKind::SpecMismatch);
}
