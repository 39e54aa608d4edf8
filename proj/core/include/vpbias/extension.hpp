#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vpbias/engine.hpp"
#include "vpbias/sampling.hpp"

namespace vpbias {

struct ExtensionCandidate {
  Asn asn;
  double bias_delta = 0.0;                    // B(V + v) - B(V)
  std::optional<double> relative_delta_pct;  // 100 * B(V + v) / B(V), only when B(V) > 0
};

struct ExtensionOptions {
  bool exclude_stubs = false;
  /// Stubs are candidates whose value in this dimension equals 1. Missing
  /// values never mark a stub.
  std::string stub_dimension = "neighbors_total";
  unsigned threads = 0;
};

struct ExtensionResult {
  SubsampleAlgorithm algorithm = SubsampleAlgorithm::Greedy;
  AsnSet selected;                          // V plus the additions
  std::vector<Asn> added;                   // in addition order
  std::vector<TrajectoryPoint> trajectory;  // starts at (|V|, B(V))
};

/// Candidates with the stub dimension equal to 1 removed. Throws
/// MissingStubDimension when the table lacks the dimension.
AsnSet exclude_stub_candidates(const FeatureTable& table, const AsnSet& candidates,
                               const std::string& stub_dimension);

/// One entry per (non-stub) candidate, ascending by bias_delta then ASN.
/// Throws EmptyCandidates when nothing remains to score and MalformedInput
/// when a candidate is already a member of V.
std::vector<ExtensionCandidate> score_candidates(const BiasEngine& engine, const AsnSet& vantage_points,
                                                 const AsnSet& candidates, const ExtensionOptions& options = {});

/// Adds the n best-ranked candidates from a single scoring pass. Throws
/// InvalidN unless 1 <= n <= #candidates.
ExtensionResult sorting_extend(const BiasEngine& engine, const AsnSet& vantage_points, const AsnSet& candidates,
                               std::size_t n, const ExtensionOptions& options = {});

/// n rounds of adding argmin_v B(V + v); ties go to the smallest ASN.
ExtensionResult greedy_extend(const BiasEngine& engine, const AsnSet& vantage_points, const AsnSet& candidates,
                              std::size_t n, const ExtensionOptions& options = {});

}  // namespace vpbias
