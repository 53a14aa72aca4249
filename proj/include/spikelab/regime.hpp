#pragma once

#include <optional>
#include <string>
#include <variant>

namespace spikelab {

// Growth of gamma as c -> infinity.
struct ConstantGamma {
  double gamma0 = 1.0;
};
struct Intermediate {};  // omega(1) and o(c^2)
struct QuadraticRate {
  double phi = 1.0;  // gamma = phi c^2
};
struct SuperQuadratic {};  // omega(c^2)
struct VanishingGamma {};  // o(1)

using GrowthClass = std::variant<ConstantGamma, Intermediate, QuadraticRate, SuperQuadratic, VanishingGamma>;

enum class AlignmentClass { Parallel, Orthogonal, Oblique };

// Bulk variance tau2 as c -> infinity.
enum class BulkScale { Constant, Vanishing };

struct OperatorAsymptotic {
  GrowthClass growth;
};
struct FrobeniusAsymptotic {};
using AsymptoticScaling = std::variant<OperatorAsymptotic, FrobeniusAsymptotic>;

struct WellSpecified {
  double alpha = 1.0;
};
struct MisspecNoShift {
  double alpha_z = 1.0;
  double alpha_a = 1.0;
};
struct MisspecShift {
  double alpha_z = 1.0;
  double alpha_a = 1.0;
  double alpha_z_test = 1.0;
  double alpha_a_test = 1.0;
};
struct SpikeRecovery {
  double alpha_z = 1.0;
};
using Setting = std::variant<WellSpecified, MisspecNoShift, MisspecShift, SpikeRecovery>;

struct RegimeQuery {
  AsymptoticScaling scaling = FrobeniusAsymptotic{};
  AlignmentClass alignment = AlignmentClass::Parallel;
  Setting setting = WellSpecified{};
  double tau2 = 1.0;
  double beta_norm2 = 1.0;
  double align2 = 1.0;
  BulkScale bulk = BulkScale::Constant;
};

enum class RegimeLabel { Benign, Tempered, Catastrophic };

struct RegimeVerdict {
  RegimeLabel label = RegimeLabel::Tempered;
  // lim R_c as c -> infinity; +inf when catastrophic, empty when no closed form is available.
  std::optional<double> limit_value;
};

std::string_view to_string(RegimeLabel l);
std::string_view to_string(AlignmentClass a);
std::string describe(const RegimeVerdict& v);

// align2 consistent with the alignment class: beta_norm2, 0, or half of beta_norm2.
double default_align2(AlignmentClass a, double beta_norm2);

RegimeVerdict classify_regime(const RegimeQuery& q);

}  // namespace spikelab
