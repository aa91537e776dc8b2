#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sks {

/// Identifier drawn from the circular 128-bit ID space.
struct Id128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  constexpr auto operator<=>(const Id128&) const = default;

  static constexpr Id128 from_u64(std::uint64_t v) { return Id128{0, v}; }

  /// Accepts `0x`-prefixed hex (up to 32 digits) or plain decimal.
  static std::optional<Id128> parse(std::string_view text);

  /// Lowercase `0x` hex without leading zeros.
  std::string to_string() const;
};

template <class Tag>
struct StrongId {
  Id128 value;

  constexpr auto operator<=>(const StrongId&) const = default;

  static constexpr StrongId from_u64(std::uint64_t v) { return StrongId{Id128::from_u64(v)}; }
  static std::optional<StrongId> parse(std::string_view text) {
    if (auto id = Id128::parse(text)) return StrongId{*id};
    return std::nullopt;
  }
  std::string to_string() const { return value.to_string(); }
};

struct UidTag {};
struct PeerIdTag {};

using Uid = StrongId<UidTag>;
using PeerId = StrongId<PeerIdTag>;

inline std::size_t hash_id(const Id128& id) noexcept {
  std::uint64_t h = id.hi * 0x9e3779b97f4a7c15ULL ^ (id.lo + 0x7f4a7c159e3779b9ULL + (id.hi << 6));
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 29;
  return static_cast<std::size_t>(h);
}

}  // namespace sks

template <>
struct std::hash<sks::Id128> {
  std::size_t operator()(const sks::Id128& id) const noexcept { return sks::hash_id(id); }
};

template <class Tag>
struct std::hash<sks::StrongId<Tag>> {
  std::size_t operator()(const sks::StrongId<Tag>& id) const noexcept { return sks::hash_id(id.value); }
};
