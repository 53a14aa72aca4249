#include "spikelab/thresholds.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spikelab/error.hpp"
#include "spikelab/model.hpp"

namespace spikelab {

std::string_view to_string(BenefitSetting s) {
  switch (s) {
    case BenefitSetting::WellSpecifiedOperator: return "well-specified/operator";
    case BenefitSetting::WellSpecifiedFrobenius: return "well-specified/frobenius";
    case BenefitSetting::MisspecifiedOperator: return "misspecified/operator";
    case BenefitSetting::MisspecifiedFrobenius: return "misspecified/frobenius";
  }
  return "unknown";
}

bool BenefitRegion::contains(double x) const {
  switch (kind) {
    case Kind::GammaAbove: return x > lower;
    case Kind::Always: return true;
    case Kind::RatioInterval: return closed ? (x >= lower && x <= upper) : (x > lower && x < upper);
    case Kind::Never: return false;
  }
  return false;
}

std::string BenefitRegion::describe() const {
  switch (kind) {
    case Kind::GammaAbove: return fmt::format("gamma > {}", lower);
    case Kind::Always: return "always";
    case Kind::RatioInterval:
      return fmt::format("alpha_z/alpha_a in {}{}, {}{}", closed ? "[" : "(", lower, upper,
                         closed ? "]" : ")");
    case Kind::Never: return "never";
  }
  return "";
}

BenefitRegion benefit_thresholds(BenefitSetting setting, double c, std::optional<double> gamma) {
  const Branch branch = branch_for(c);
  BenefitRegion r;
  const bool well = setting == BenefitSetting::WellSpecifiedOperator ||
                    setting == BenefitSetting::WellSpecifiedFrobenius;
  if (branch == Branch::Under) {
    if (well)
      throw Error(ErrorKind::UnsupportedSetting,
                  fmt::format("no tabulated benefit region for {} at c = {} < 1", to_string(setting), c));
    r.kind = BenefitRegion::Kind::Never;
    return r;
  }
  switch (setting) {
    case BenefitSetting::WellSpecifiedOperator:
      r.kind = BenefitRegion::Kind::GammaAbove;
      r.lower = c * (c - 2.0);
      break;
    case BenefitSetting::WellSpecifiedFrobenius:
      r.kind = BenefitRegion::Kind::Always;
      break;
    case BenefitSetting::MisspecifiedOperator: {
      if (!gamma || !(*gamma >= 0.0) || !std::isfinite(*gamma))
        throw Error(ErrorKind::InvalidSpec, "misspecified operator region needs gamma >= 0");
      const double g = *gamma;
      r.kind = BenefitRegion::Kind::RatioInterval;
      r.closed = true;
      r.lower = 1.0 / c;
      r.upper = (3.0 * c * c - g + 2.0 * c * g - 2.0 * c) / (c * (c * c + g));
      break;
    }
    case BenefitSetting::MisspecifiedFrobenius:
      r.kind = BenefitRegion::Kind::RatioInterval;
      r.closed = false;
      r.lower = 1.0 / c;
      r.upper = (2.0 * c - 1.0) / c;
      break;
  }
  return r;
}

}  // namespace spikelab
