#pragma once

#include <cstdint>
#include <string>

#include "dash/bytes.hpp"
#include "dash/error.hpp"
#include "dash/hash.hpp"

namespace dash::json {

// Typed field access that reports shape errors with a caller-chosen code.

inline const Json& at(const Json& j, const char* key, ErrorCode code = ErrorCode::Corrupt) {
  if (!j.is_object()) fail(code, std::string("expected object containing '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) fail(code, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string str(const Json& j, const char* key, ErrorCode code = ErrorCode::Corrupt) {
  const auto& v = at(j, key, code);
  if (!v.is_string()) fail(code, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline std::uint64_t u64(const Json& j, const char* key, ErrorCode code = ErrorCode::Corrupt) {
  const auto& v = at(j, key, code);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    fail(code, std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

inline std::int64_t i64(const Json& j, const char* key, ErrorCode code = ErrorCode::Corrupt) {
  const auto& v = at(j, key, code);
  if (!v.is_number_integer()) fail(code, std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline bool boolean(const Json& j, const char* key, ErrorCode code = ErrorCode::Corrupt) {
  const auto& v = at(j, key, code);
  if (!v.is_boolean()) fail(code, std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

inline Address address(const Json& j, const char* key, ErrorCode code = ErrorCode::Corrupt) {
  Address a;
  if (!Address::tryFromHex(str(j, key, code), a)) fail(code, std::string("field '") + key + "' is not an address");
  return a;
}

inline Digest digest(const Json& j, const char* key, ErrorCode code = ErrorCode::Corrupt) {
  Digest d;
  if (!Digest::tryFromHex(str(j, key, code), d)) fail(code, std::string("field '") + key + "' is not a digest");
  return d;
}

}  // namespace dash::json
