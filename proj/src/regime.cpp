#include "spikelab/regime.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "spikelab/error.hpp"

namespace spikelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

RegimeVerdict benign() { return {RegimeLabel::Benign, 0.0}; }
RegimeVerdict tempered(std::optional<double> v) { return {RegimeLabel::Tempered, v}; }
RegimeVerdict catastrophic() { return {RegimeLabel::Catastrophic, kInf}; }

[[noreturn]] void unsupported(const std::string& what) {
  throw Error(ErrorKind::UnsupportedCombination, what);
}

void validate(const RegimeQuery& q) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidSpec, m); };
  if (!(q.tau2 > 0.0) || !std::isfinite(q.tau2)) fail("tau2 must be positive");
  if (!(q.beta_norm2 > 0.0) || !std::isfinite(q.beta_norm2)) fail("beta_norm2 must be positive");
  if (!(q.align2 >= 0.0) || q.align2 > q.beta_norm2 * (1.0 + 1e-12))
    fail("align2 must lie in [0, beta_norm2]");
  const double tol = 1e-12 * q.beta_norm2;
  switch (q.alignment) {
    case AlignmentClass::Parallel:
      if (std::abs(q.align2 - q.beta_norm2) > tol) fail("parallel alignment needs align2 = beta_norm2");
      break;
    case AlignmentClass::Orthogonal:
      if (q.align2 > tol) fail("orthogonal alignment needs align2 = 0");
      break;
    case AlignmentClass::Oblique:
      if (q.align2 <= tol || q.align2 >= q.beta_norm2 - tol)
        fail("oblique alignment needs 0 < align2 < beta_norm2");
      break;
  }
  if (auto* op = std::get_if<OperatorAsymptotic>(&q.scaling)) {
    if (auto* g = std::get_if<ConstantGamma>(&op->growth); g && !(g->gamma0 > 0.0 && std::isfinite(g->gamma0)))
      fail("gamma0 must be positive");
    if (auto* p = std::get_if<QuadraticRate>(&op->growth); p && !(p->phi > 0.0 && std::isfinite(p->phi)))
      fail("phi must be positive");
  }
}

RegimeVerdict well_specified(const RegimeQuery& q, double alpha) {
  const double s = alpha * alpha * q.tau2, a = q.beta_norm2, b = q.align2;
  const bool orth = q.alignment == AlignmentClass::Orthogonal;
  const bool par = q.alignment == AlignmentClass::Parallel;
  if (std::holds_alternative<FrobeniusAsymptotic>(q.scaling))
    return par ? benign() : tempered(s * (a - b));
  return std::visit(
      overloaded{
          [&](const ConstantGamma& g) { return tempered(s * (a + g.gamma0 * b)); },
          [&](const Intermediate&) { return orth ? tempered(s * a) : catastrophic(); },
          [&](const QuadraticRate& p) { return tempered(s * (a + (1.0 / p.phi - 1.0) * b)); },
          [&](const SuperQuadratic&) { return par ? benign() : tempered(s * (a - b)); },
          [&](const VanishingGamma&) -> RegimeVerdict {
            unsupported("vanishing gamma is only tabulated for spike recovery");
          },
      },
      std::get<OperatorAsymptotic>(q.scaling).growth);
}

RegimeVerdict misspec_no_shift(const RegimeQuery& q, double az, double aa) {
  const double t2 = q.tau2, a = q.beta_norm2, b = q.align2;
  const bool orth = q.alignment == AlignmentClass::Orthogonal;
  if (std::holds_alternative<FrobeniusAsymptotic>(q.scaling))
    return tempered(t2 * (b * (az * az - 2.0 * aa * az) + a * aa * aa));
  if (orth && !std::holds_alternative<VanishingGamma>(std::get<OperatorAsymptotic>(q.scaling).growth))
    return tempered(aa * aa * t2 * a);
  return std::visit(
      overloaded{
          [&](const ConstantGamma& g) { return tempered(t2 * (g.gamma0 * az * az * b + aa * aa * a)); },
          [&](const Intermediate&) { return catastrophic(); },
          [&](const QuadraticRate& p) {
            return tempered(t2 * (aa * aa * a + (az * az * (1.0 + 1.0 / p.phi) - 2.0 * az * aa) * b));
          },
          [&](const SuperQuadratic&) { return tempered(t2 * (aa * aa * a + (az * az - 2.0 * az * aa) * b)); },
          [&](const VanishingGamma&) -> RegimeVerdict {
            unsupported("vanishing gamma is only tabulated for spike recovery");
          },
      },
      std::get<OperatorAsymptotic>(q.scaling).growth);
}

RegimeVerdict misspec_shift(const RegimeQuery& q, const MisspecShift& m) {
  const double t2 = q.tau2, a = q.beta_norm2, b = q.align2;
  const double az = m.alpha_z, azt = m.alpha_z_test, aat = m.alpha_a_test;
  const bool orth = q.alignment == AlignmentClass::Orthogonal;
  const bool par = q.alignment == AlignmentClass::Parallel;
  const bool z_shift = az != azt;
  const double common = t2 * (b * (az * az - 2.0 * aat * az) + a * aat * aat);

  if (std::holds_alternative<FrobeniusAsymptotic>(q.scaling)) {
    if (z_shift && !orth) return catastrophic();
    if (!z_shift && azt == aat && par) return benign();
    return tempered(common);
  }
  const GrowthClass& growth = std::get<OperatorAsymptotic>(q.scaling).growth;
  if (std::holds_alternative<VanishingGamma>(growth))
    unsupported("vanishing gamma is only tabulated for spike recovery");
  if (orth) return tempered(aat * aat * t2 * a);
  const bool grows = !std::holds_alternative<ConstantGamma>(growth);
  if (z_shift && grows) return catastrophic();
  return std::visit(
      overloaded{
          [&](const ConstantGamma& g) { return tempered(t2 * (g.gamma0 * azt * azt * b + aat * aat * a)); },
          [&](const Intermediate&) { return catastrophic(); },
          [&](const QuadraticRate& p) {
            return tempered(t2 * ((az * az * (1.0 + 1.0 / p.phi) - 2.0 * aat * az) * b + aat * aat * a));
          },
          [&](const SuperQuadratic&) { return tempered(common); },
          [&](const VanishingGamma&) -> RegimeVerdict { unsupported("vanishing gamma"); },
      },
      growth);
}

RegimeVerdict spike_recovery(const RegimeQuery& q) {
  const bool bulk_vanishes = q.bulk == BulkScale::Vanishing;
  if (std::holds_alternative<FrobeniusAsymptotic>(q.scaling))
    return bulk_vanishes ? benign() : tempered(std::nullopt);
  // Classified by the order of gamma * tau2.
  return std::visit(
      overloaded{
          [&](const ConstantGamma&) { return bulk_vanishes ? benign() : tempered(std::nullopt); },
          [&](const VanishingGamma&) { return benign(); },
          [&](const auto&) -> RegimeVerdict {
            if (bulk_vanishes) unsupported("growing gamma with vanishing tau2 leaves gamma * tau2 undetermined");
            return catastrophic();
          },
      },
      std::get<OperatorAsymptotic>(q.scaling).growth);
}

}  // namespace

std::string_view to_string(RegimeLabel l) {
  switch (l) {
    case RegimeLabel::Benign: return "Benign";
    case RegimeLabel::Tempered: return "Tempered";
    case RegimeLabel::Catastrophic: return "Catastrophic";
  }
  return "Unknown";
}

std::string_view to_string(AlignmentClass a) {
  switch (a) {
    case AlignmentClass::Parallel: return "parallel";
    case AlignmentClass::Orthogonal: return "orthogonal";
    case AlignmentClass::Oblique: return "oblique";
  }
  return "unknown";
}

std::string describe(const RegimeVerdict& v) {
  if (!v.limit_value) return fmt::format("{}, limit n/a", to_string(v.label));
  if (std::isinf(*v.limit_value)) return fmt::format("{}, limit inf", to_string(v.label));
  return fmt::format("{}, limit {}", to_string(v.label), *v.limit_value);
}

double default_align2(AlignmentClass a, double beta_norm2) {
  switch (a) {
    case AlignmentClass::Parallel: return beta_norm2;
    case AlignmentClass::Orthogonal: return 0.0;
    case AlignmentClass::Oblique: return 0.5 * beta_norm2;
  }
  return 0.0;
}

RegimeVerdict classify_regime(const RegimeQuery& q) {
  validate(q);
  const bool spike = std::holds_alternative<SpikeRecovery>(q.setting);
  if (q.bulk == BulkScale::Vanishing && !spike)
    unsupported("vanishing bulk variance is only tabulated for spike recovery");
  return std::visit(
      overloaded{
          [&](const WellSpecified& w) {
            if (!(w.alpha > 0.0)) throw Error(ErrorKind::InvalidSpec, "alpha must be positive");
            return well_specified(q, w.alpha);
          },
          [&](const MisspecNoShift& m) {
            if (m.alpha_z == m.alpha_a)
              throw Error(ErrorKind::InvalidSpec, "misspecified setting needs alpha_z != alpha_a");
            return misspec_no_shift(q, m.alpha_z, m.alpha_a);
          },
          [&](const MisspecShift& m) {
            if (m.alpha_z == m.alpha_z_test && m.alpha_a == m.alpha_a_test)
              throw Error(ErrorKind::InvalidSpec, "covariate shift needs a test-side alpha to differ");
            return misspec_shift(q, m);
          },
          [&](const SpikeRecovery&) { return spike_recovery(q); },
      },
      q.setting);
}

}  // namespace spikelab
