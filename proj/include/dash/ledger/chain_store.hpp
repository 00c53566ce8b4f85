#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dash/ledger/block.hpp"
#include "dash/ledger/chain_config.hpp"
#include "dash/ledger/receipt.hpp"
#include "dash/ledger/validation.hpp"

namespace dash::ledger {

struct AccountJournalEntry {
  std::string label;
  std::uint64_t beforeHeight = 0;  // created after beforeHeight blocks were committed
};

/// Data directory layout:
///   genesis.json    canonical chain config
///   chain.jsonl     one canonical block per line
///   receipts.jsonl  one receipt per line, keyed by txId
///   accounts.jsonl  EOA creation journal
///   mempool.jsonl   pending transactions
class ChainStore {
 public:
  explicit ChainStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  bool hasGenesis() const;

  void writeGenesis(const ChainConfig& config) const;
  ChainConfig readGenesis() const;

  void appendBlock(const Block& block, const std::vector<Receipt>& receipts) const;
  void appendAccount(const AccountJournalEntry& entry) const;
  void writeMempool(const std::vector<Transaction>& txs) const;

  /// Reads chain.jsonl. A line that fails to decode stops reading and is
  /// reported as a "decode" failure at that height.
  std::vector<Block> readBlocks(std::optional<ValidationFailure>* decodeFailure = nullptr) const;
  std::vector<Receipt> readReceipts() const;
  std::vector<AccountJournalEntry> readAccounts() const;
  std::vector<Transaction> readMempool() const;

  std::filesystem::path chainFile() const { return dir_ / "chain.jsonl"; }
  std::filesystem::path receiptsFile() const { return dir_ / "receipts.jsonl"; }

 private:
  std::filesystem::path dir_;
};

/// Reads lines of a text file; empty when the file does not exist.
std::vector<std::string> readLines(const std::filesystem::path& file);
void appendLine(const std::filesystem::path& file, const std::string& line);
/// Write-to-temp then rename.
void writeFileAtomic(const std::filesystem::path& file, const std::string& content);

}  // namespace dash::ledger
