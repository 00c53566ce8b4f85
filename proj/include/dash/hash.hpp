#pragma once

#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dash/bytes.hpp"

namespace dash {

using Json = nlohmann::json;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

// Canonical JSON profile: UTF-8, object keys sorted bytewise, no insignificant
// whitespace, integers only. Floats (including NaN/inf) are Unserializable.

/// Throws Unserializable when the value falls outside the profile.
std::string canonicalDump(const Json& value);

/// Parses and requires that the input is already in canonical form byte for byte.
/// Throws Corrupt otherwise.
Json canonicalParse(std::string_view text);

Digest hashCanonical(const Json& value);

/// Number of leading zero bits in the digest.
int leadingZeroBits(const Digest& d);

}  // namespace dash
