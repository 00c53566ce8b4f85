#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dash/ledger/transaction.hpp"

namespace dash::ledger {

struct BlockHeader {
  std::uint64_t height = 0;
  Digest prevHash;
  Digest txRoot;
  std::uint64_t powNonce = 0;
  std::uint32_t difficulty = 0;
  std::uint64_t timestamp = 0;

  Json toJson() const;
  std::string canonical() const { return canonicalDump(toJson()); }
  Digest hash() const { return sha256(canonical()); }
  bool meetsDifficulty() const { return leadingZeroBits(hash()) >= static_cast<int>(difficulty); }

  bool operator==(const BlockHeader&) const = default;
};

struct Block {
  BlockHeader header;
  std::vector<Transaction> transactions;

  Digest hash() const { return header.hash(); }

  /// Flat on-disk form: header fields, a redundant "hash" and the transactions.
  Json toJson() const;
  /// Throws Corrupt on shape errors or when the stored hash disagrees with the header.
  static Block fromJson(const Json& j);

  bool operator==(const Block&) const = default;
};

/// Flat digest over the concatenated ordered transaction ids.
Digest computeTxRoot(std::span<const Digest> ids);
/// Recomputes each id from transaction content before hashing.
Digest computeTxRoot(std::span<const Transaction> txs);

/// Searches powNonce upward from 0 until the header meets its difficulty.
/// Returns the number of attempts made.
std::uint64_t solvePow(BlockHeader& header);

}  // namespace dash::ledger
