#pragma once

namespace vpbias::detail {

extern const char* const kDefaultSchemaCsv;
extern const char* const kComplexityScoresCsv;

}  // namespace vpbias::detail
