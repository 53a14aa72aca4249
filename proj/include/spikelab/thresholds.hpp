#pragma once

#include <optional>
#include <string>

namespace spikelab {

enum class BenefitSetting {
  WellSpecifiedOperator,
  WellSpecifiedFrobenius,
  MisspecifiedOperator,
  MisspecifiedFrobenius,
};

std::string_view to_string(BenefitSetting s);

// Where aligning beta* with the spike lowers the risk.
struct BenefitRegion {
  enum class Kind {
    GammaAbove,     // gamma > lower
    Always,         // every admissible parameter
    RatioInterval,  // alpha_z / alpha_a in [lower, upper] (closed) or (lower, upper)
    Never,
  };
  Kind kind = Kind::Never;
  double lower = 0.0;
  double upper = 0.0;
  bool closed = false;

  // x is gamma for GammaAbove and alpha_z / alpha_a for RatioInterval.
  bool contains(double x) const;
  std::string describe() const;
};

// gamma is required for MisspecifiedOperator and ignored otherwise.
BenefitRegion benefit_thresholds(BenefitSetting setting, double c,
                                 std::optional<double> gamma = std::nullopt);

}  // namespace spikelab
