#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vpbias {

enum class ErrorCode {
  Io,
  MalformedCsv,
  MalformedInput,
  DuplicateAsn,
  TypeMismatch,
  UnknownAsn,
  UnknownDimension,
  InvalidSchema,
  EmptySet,
  UnknownLabel,
  EmptyLabelSet,
  InvalidScoreTable,
  NoData,
  BinMismatch,
  InsufficientSupport,
  InvalidConfig,
  InvalidAggregation,
  EmptyPopulation,
  EmptySample,
  NoAggregatableDimension,
  InvalidK,
  InvalidN,
  EmptyCandidates,
  MissingStubDimension,
  InsufficientData,
  EmptyEstimateSet,
  AllZeroGroundTruth,
  InvalidSpec,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// front ends can map it to exit statuses or HTTP responses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vpbias
