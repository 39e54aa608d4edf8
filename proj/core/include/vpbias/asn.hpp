#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace vpbias {

/// Autonomous system number. Zero is reserved and never a valid key.
class Asn {
 public:
  constexpr Asn() = default;
  constexpr explicit Asn(std::uint32_t value) : value_(value) {}

  constexpr std::uint32_t value() const noexcept { return value_; }

  friend constexpr auto operator<=>(Asn, Asn) = default;

 private:
  std::uint32_t value_ = 0;
};

using AsnSet = std::set<Asn>;

/// Parses "64512" or "AS64512" (case-insensitive prefix). Returns nullopt for
/// anything else, including 0 and values above 2^32-1.
std::optional<Asn> parse_asn(std::string_view text);

std::string to_string(Asn asn);

}  // namespace vpbias

template <>
struct std::hash<vpbias::Asn> {
  std::size_t operator()(vpbias::Asn asn) const noexcept {
    return std::hash<std::uint32_t>{}(asn.value());
  }
};
