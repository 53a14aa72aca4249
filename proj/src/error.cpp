#include "spikelab/error.hpp"

namespace spikelab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::GuardBand: return "GuardBand";
    case ErrorKind::MissingDimension: return "MissingDimension";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::UnsupportedSetting: return "UnsupportedSetting";
    case ErrorKind::UnsupportedCombination: return "UnsupportedCombination";
    case ErrorKind::InvalidPlan: return "InvalidPlan";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingColumns: return "MissingColumns";
    case ErrorKind::DecompositionFailure: return "DecompositionFailure";
    case ErrorKind::DegenerateXi: return "DegenerateXi";
    case ErrorKind::RankDeficient: return "RankDeficient";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

bool Error::numerical() const noexcept {
  return kind_ == ErrorKind::DecompositionFailure || kind_ == ErrorKind::DegenerateXi ||
         kind_ == ErrorKind::RankDeficient;
}

}  // namespace spikelab
