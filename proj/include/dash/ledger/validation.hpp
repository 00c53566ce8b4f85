#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "dash/ledger/block.hpp"

namespace dash::ledger {

struct ValidationFailure {
  std::uint64_t height = 0;
  std::string rule;  // genesis | linkage | timestamp | txRoot | txId | difficulty | nonce | decode
  std::string detail;
};

struct ValidationReport {
  bool valid = true;
  std::optional<ValidationFailure> firstFailure;

  static ValidationReport ok() { return {}; }
  static ValidationReport failure(std::uint64_t height, std::string rule, std::string detail) {
    return {false, ValidationFailure{height, std::move(rule), std::move(detail)}};
  }
  Json toJson() const;
};

/// Checks, per block in order: genesis shape, prevHash linkage, txRoot, stored
/// tx ids, header difficulty, per-sender nonce sequence. Reports the first violation.
ValidationReport validateBlocks(std::span<const Block> blocks, std::uint32_t difficulty);

}  // namespace dash::ledger
