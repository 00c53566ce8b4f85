#include <openssl/evp.h>

#include <memory>

#include "dash/bytes.hpp"
#include "dash/error.hpp"
#include "dash/hash.hpp"

namespace dash {

std::string_view toString(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedTransaction: return "MalformedTransaction";
    case ErrorCode::UnknownSender: return "UnknownSender";
    case ErrorCode::NonceMismatch: return "NonceMismatch";
    case ErrorCode::EmptyMempool: return "EmptyMempool";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Unserializable: return "Unserializable";
    case ErrorCode::Corrupt: return "Corrupt";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::UnknownContractType: return "UnknownContractType";
    case ErrorCode::OutOfGas: return "OutOfGas";
    case ErrorCode::NotAContract: return "NotAContract";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::Reverted: return "Reverted";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::DuplicatePatient: return "DuplicatePatient";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidFilter: return "InvalidFilter";
    case ErrorCode::UnknownSubscriber: return "UnknownSubscriber";
    case ErrorCode::UnknownSubscription: return "UnknownSubscription";
    case ErrorCode::OutOfOrderDispatch: return "OutOfOrderDispatch";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::IntegrityMismatch: return "IntegrityMismatch";
  }
  return "Unknown";
}

std::string toHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

bool fromHex(std::string_view hex, std::span<std::uint8_t> out) {
  if (hex.size() != out.size() * 2) return false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return false;
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return true;
}

bool Digest::tryFromHex(std::string_view hex, Digest& out) { return dash::fromHex(hex, out.bytes); }

Digest Digest::fromHex(std::string_view hex) {
  Digest d;
  if (!tryFromHex(hex, d)) fail(ErrorCode::Corrupt, "bad digest hex '" + std::string(hex) + "'");
  return d;
}

bool Digest::isZero() const {
  for (auto b : bytes)
    if (b != 0) return false;
  return true;
}

bool Address::tryFromHex(std::string_view hex, Address& out) {
  if (hex.size() != 42 || hex[0] != '0' || hex[1] != 'x') return false;
  return dash::fromHex(hex.substr(2), out.bytes);
}

Address Address::fromHex(std::string_view hex) {
  Address a;
  if (!tryFromHex(hex, a)) fail(ErrorCode::InvalidArgument, "bad address '" + std::string(hex) + "'");
  return a;
}

Address Address::fromDigest(const Digest& d) {
  Address a;
  std::copy_n(d.bytes.begin(), a.bytes.size(), a.bytes.begin());
  return a;
}

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32)
    throw std::runtime_error("EVP_Digest(sha256) failed");
  return out;
}

Digest sha256(std::string_view data) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

namespace {

void requireIntegral(const Json& v) {
  switch (v.type()) {
    case Json::value_t::number_float:
      fail(ErrorCode::Unserializable, "floating-point values are outside the canonical profile");
    case Json::value_t::binary:
      fail(ErrorCode::Unserializable, "binary values are outside the canonical profile");
    case Json::value_t::discarded:
      fail(ErrorCode::Unserializable, "discarded value");
    case Json::value_t::object:
    case Json::value_t::array:
      for (const auto& child : v) requireIntegral(child);
      break;
    default:
      break;
  }
}

}  // namespace

std::string canonicalDump(const Json& value) {
  requireIntegral(value);
  try {
    return value.dump(-1, ' ', false, Json::error_handler_t::strict);
  } catch (const Json::type_error& e) {
    fail(ErrorCode::Unserializable, e.what());
  }
}

Json canonicalParse(std::string_view text) {
  Json parsed;
  try {
    parsed = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::Corrupt, e.what());
  }
  std::string again;
  try {
    again = canonicalDump(parsed);
  } catch (const Error& e) {
    fail(ErrorCode::Corrupt, e.what());
  }
  if (again != text) fail(ErrorCode::Corrupt, "input is not in canonical form");
  return parsed;
}

Digest hashCanonical(const Json& value) { return sha256(canonicalDump(value)); }

int leadingZeroBits(const Digest& d) {
  int bits = 0;
  for (auto b : d.bytes) {
    if (b == 0) {
      bits += 8;
      continue;
    }
    for (int i = 7; i >= 0 && !(b & (1u << i)); --i) ++bits;
    break;
  }
  return bits;
}

}  // namespace dash
