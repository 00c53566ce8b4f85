#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dash {

using Bytes = std::vector<std::uint8_t>;

std::string toHex(std::span<const std::uint8_t> bytes);

/// Strict lowercase hex decode; returns false on odd length, uppercase or non-hex input.
bool fromHex(std::string_view hex, std::span<std::uint8_t> out);

/// 32-byte SHA-256 output.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const { return toHex(bytes); }
  static Digest fromHex(std::string_view hex);  // throws Corrupt
  static bool tryFromHex(std::string_view hex, Digest& out);
  bool isZero() const;

  auto operator<=>(const Digest&) const = default;
};

/// 20-byte account identifier, rendered as 0x-prefixed lowercase hex.
struct Address {
  std::array<std::uint8_t, 20> bytes{};

  std::string hex() const { return "0x" + toHex(bytes); }
  static Address fromHex(std::string_view hex);  // throws InvalidArgument
  static bool tryFromHex(std::string_view hex, Address& out);
  static Address fromDigest(const Digest& d);

  auto operator<=>(const Address&) const = default;
};

}  // namespace dash

template <>
struct std::hash<dash::Digest> {
  std::size_t operator()(const dash::Digest& d) const noexcept {
    std::size_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};

template <>
struct std::hash<dash::Address> {
  std::size_t operator()(const dash::Address& a) const noexcept {
    std::size_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | a.bytes[i];
    return h;
  }
};
