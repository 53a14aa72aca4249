#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spikelab {

enum class ErrorKind {
  InvalidSpec,
  GuardBand,
  MissingDimension,
  SpecMismatch,
  UnsupportedSetting,
  UnsupportedCombination,
  InvalidPlan,
  DimensionMismatch,
  MissingColumns,
  DecompositionFailure,
  DegenerateXi,
  RankDeficient,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  // True for failures of a numerical routine rather than of the inputs.
  bool numerical() const noexcept;

 private:
  ErrorKind kind_;
};

}  // namespace spikelab
