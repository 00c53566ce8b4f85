#include "dash/ledger/validation.hpp"

#include <map>

namespace dash::ledger {

Json ValidationReport::toJson() const {
  Json j{{"valid", valid}};
  if (firstFailure)
    j["firstFailure"] = Json{{"height", firstFailure->height}, {"rule", firstFailure->rule}, {"detail", firstFailure->detail}};
  return j;
}

ValidationReport validateBlocks(std::span<const Block> blocks, std::uint32_t difficulty) {
  std::map<Address, std::uint64_t> nextNonce;
  Digest prevHash{};

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& block = blocks[i];
    const auto& h = block.header;
    if (h.height != i) return ValidationReport::failure(i, "genesis", "height " + std::to_string(h.height) + " out of sequence");
    if (i == 0 && !h.prevHash.isZero())
      return ValidationReport::failure(0, "genesis", "genesis prevHash must be all zero bytes");
    if (h.prevHash != prevHash) return ValidationReport::failure(i, "linkage", "prevHash does not match predecessor header");
    if (i > 0 && h.timestamp < blocks[i - 1].header.timestamp)
      return ValidationReport::failure(i, "timestamp", "timestamp decreases");

    std::vector<Digest> ids;
    ids.reserve(block.transactions.size());
    for (const auto& tx : block.transactions) ids.push_back(tx.computeId());
    if (computeTxRoot(ids) != h.txRoot) return ValidationReport::failure(i, "txRoot", "txRoot does not match transactions");
    for (std::size_t t = 0; t < ids.size(); ++t) {
      if (ids[t] != block.transactions[t].id)
        return ValidationReport::failure(i, "txId", "transaction " + std::to_string(t) + " id does not match content");
    }

    if (h.difficulty != difficulty)
      return ValidationReport::failure(i, "difficulty", "header difficulty differs from chain configuration");
    if (!h.meetsDifficulty()) return ValidationReport::failure(i, "difficulty", "header digest misses difficulty target");

    for (const auto& tx : block.transactions) {
      auto& expected = nextNonce[tx.sender];
      if (tx.senderNonce != expected)
        return ValidationReport::failure(i, "nonce", tx.sender.hex() + " nonce " + std::to_string(tx.senderNonce) +
                                                         " expected " + std::to_string(expected));
      ++expected;
    }
    prevHash = h.hash();
  }
  return ValidationReport::ok();
}

}  // namespace dash::ledger
