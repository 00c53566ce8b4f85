#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "dash/bytes.hpp"
#include "dash/hash.hpp"

namespace dash::ledger {

struct CreateContract {
  std::string typeId;
  std::uint32_t version = 1;
  Json ctorArgs = Json::object();
  bool operator==(const CreateContract&) const = default;
};

struct CallContract {
  Address target;
  std::string function;
  Json args = Json::object();
  bool operator==(const CallContract&) const = default;
};

struct Transfer {
  Address target;
  std::uint64_t amount = 0;
  bool operator==(const Transfer&) const = default;
};

using Payload = std::variant<CreateContract, CallContract, Transfer>;

struct Transaction {
  Digest id;
  Address sender;
  std::uint64_t senderNonce = 0;
  Payload payload;
  std::uint64_t gasLimit = 0;
  std::uint64_t timestamp = 0;

  /// Canonical encoding without the id field; the id is its digest.
  Json body() const;
  Json toJson() const;
  Digest computeId() const;
  bool idMatches() const { return computeId() == id; }

  /// Builds a transaction and stamps its id.
  static Transaction make(const Address& sender, std::uint64_t nonce, Payload payload, std::uint64_t gasLimit,
                          std::uint64_t timestamp);
  /// Throws MalformedTransaction on shape errors. Does not check the id.
  static Transaction fromJson(const Json& j);

  bool operator==(const Transaction&) const = default;
};

Json payloadToJson(const Payload& p);
Payload payloadFromJson(const Json& j);

}  // namespace dash::ledger
