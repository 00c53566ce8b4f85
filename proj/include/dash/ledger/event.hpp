#pragma once

#include <cstdint>
#include <string>

#include "dash/bytes.hpp"
#include "dash/hash.hpp"

namespace dash::ledger {

/// A log entry emitted by a contract call and attached to the receipt.
struct Event {
  Address emitter;
  std::string topic;
  Json payload;
  std::uint32_t sequence = 0;  // per-block ordinal

  Json toJson() const;
  static Event fromJson(const Json& j);
  bool operator==(const Event&) const = default;
};

}  // namespace dash::ledger
