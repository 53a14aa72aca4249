#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace spikelab {

// Half-width of the excluded band around c = 1.
inline constexpr double kGuardBand = 1e-3;

enum class Branch { Under, Over };

std::string_view to_string(Branch b);

struct OperatorNorm {
  double gamma = 1.0;
  bool operator==(const OperatorNorm&) const = default;
};
struct FrobeniusNorm {
  bool operator==(const FrobeniusNorm&) const = default;
};
struct ExplicitSpike {
  double theta2 = 0.0;
  bool operator==(const ExplicitSpike&) const = default;
};

using ScalingRegime = std::variant<OperatorNorm, FrobeniusNorm, ExplicitSpike>;

std::string describe(const ScalingRegime& s);

// User-facing parameters; optional test-side fields default to the training side.
struct SpecInput {
  std::optional<std::int64_t> d;
  std::optional<std::int64_t> n;
  std::optional<double> c;
  ScalingRegime scaling = ExplicitSpike{0.0};
  double tau2 = 1.0;
  double tau_eps2 = 0.0;
  std::optional<double> theta2_test;
  std::optional<double> tau2_test;
  std::optional<double> tau_eps2_test;
  double alpha_z = 1.0;
  double alpha_a = 1.0;
  std::optional<double> alpha_z_test;
  std::optional<double> alpha_a_test;
  double beta_norm2 = 1.0;
  double align2 = 0.0;
};

// Fully resolved problem. theta2 is +inf for Frobenius scaling without dimensions.
struct ProblemSpec {
  std::optional<std::int64_t> d;
  std::optional<std::int64_t> n;
  double c = 0.0;
  ScalingRegime scaling = ExplicitSpike{0.0};
  double theta2 = 0.0;
  double tau2 = 1.0;
  double tau_eps2 = 0.0;
  double theta2_test = 0.0;
  double tau2_test = 1.0;
  double tau_eps2_test = 0.0;
  double alpha_z = 1.0;
  double alpha_a = 1.0;
  double alpha_z_test = 1.0;
  double alpha_a_test = 1.0;
  double beta_norm2 = 1.0;
  double align2 = 0.0;

  bool has_dimensions() const { return d.has_value() && n.has_value(); }
  bool is_frobenius() const { return std::holds_alternative<FrobeniusNorm>(scaling); }
  std::optional<double> gamma() const;
  bool operator==(const ProblemSpec&) const = default;
};

ProblemSpec resolve_spec(const SpecInput& in);
// Re-validates an already resolved spec; resolve_spec(resolve_spec(x)) == resolve_spec(x).
ProblemSpec resolve_spec(const ProblemSpec& spec);
SpecInput to_input(const ProblemSpec& spec);

// Branch for a ratio c, rejecting |c - 1| <= kGuardBand.
Branch branch_for(double c);
// Throws SpecMismatch if b disagrees with the branch of c.
void check_branch(double c, Branch b);

}  // namespace spikelab
