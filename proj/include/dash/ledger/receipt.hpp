#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dash/ledger/event.hpp"

namespace dash::ledger {

enum class TxStatus { Success, Reverted };

struct Receipt {
  Digest txId;
  TxStatus status = TxStatus::Success;
  std::string revertReason;  // empty on success
  std::uint64_t gasUsed = 0;
  std::optional<Json> returnValue;
  std::vector<Event> events;
  std::uint64_t blockHeight = 0;
  std::uint32_t indexInBlock = 0;

  bool ok() const { return status == TxStatus::Success; }
  Json toJson() const;
  static Receipt fromJson(const Json& j);
  bool operator==(const Receipt&) const = default;
};

}  // namespace dash::ledger
