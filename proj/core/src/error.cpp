#include "vpbias/error.hpp"

namespace vpbias {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::DuplicateAsn: return "DuplicateAsn";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::UnknownAsn: return "UnknownAsn";
    case ErrorCode::UnknownDimension: return "UnknownDimension";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyLabelSet: return "EmptyLabelSet";
    case ErrorCode::InvalidScoreTable: return "InvalidScoreTable";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::BinMismatch: return "BinMismatch";
    case ErrorCode::InsufficientSupport: return "InsufficientSupport";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidAggregation: return "InvalidAggregation";
    case ErrorCode::EmptyPopulation: return "EmptyPopulation";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NoAggregatableDimension: return "NoAggregatableDimension";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::MissingStubDimension: return "MissingStubDimension";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EmptyEstimateSet: return "EmptyEstimateSet";
    case ErrorCode::AllZeroGroundTruth: return "AllZeroGroundTruth";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

}  // namespace vpbias
