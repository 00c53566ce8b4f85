#include "dash/ledger/chain_store.hpp"

#include <fstream>
#include <sstream>

#include "dash/error.hpp"
#include "dash/json_util.hpp"

namespace dash::ledger {

namespace fs = std::filesystem;

std::vector<std::string> readLines(const fs::path& file) {
  std::vector<std::string> lines;
  std::ifstream in(file, std::ios::binary);
  if (!in) return lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

void appendLine(const fs::path& file, const std::string& line) {
  std::ofstream out(file, std::ios::binary | std::ios::app);
  if (!out) fail(ErrorCode::BackendUnavailable, "cannot open " + file.string());
  out << line << '\n';
  out.flush();
  if (!out) fail(ErrorCode::BackendUnavailable, "write failed: " + file.string());
}

void writeFileAtomic(const fs::path& file, const std::string& content) {
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::BackendUnavailable, "cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::BackendUnavailable, "write failed: " + tmp.string());
  }
  fs::rename(tmp, file);
}

ChainStore::ChainStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

bool ChainStore::hasGenesis() const { return fs::exists(dir_ / "genesis.json"); }

void ChainStore::writeGenesis(const ChainConfig& config) const {
  writeFileAtomic(dir_ / "genesis.json", canonicalDump(config.toJson()) + "\n");
}

ChainConfig ChainStore::readGenesis() const {
  auto lines = readLines(dir_ / "genesis.json");
  if (lines.size() != 1) fail(ErrorCode::Corrupt, "genesis.json missing or malformed in " + dir_.string());
  return ChainConfig::fromJson(canonicalParse(lines[0]));
}

void ChainStore::appendBlock(const Block& block, const std::vector<Receipt>& receipts) const {
  // Receipts first: a crash between the two writes leaves orphan receipts,
  // which replay ignores, rather than a block without receipts.
  std::string lines;
  for (const auto& r : receipts) lines += canonicalDump(r.toJson()) + "\n";
  if (!lines.empty()) {
    lines.pop_back();
    appendLine(receiptsFile(), lines);
  }
  appendLine(chainFile(), canonicalDump(block.toJson()));
}

void ChainStore::appendAccount(const AccountJournalEntry& entry) const {
  appendLine(dir_ / "accounts.jsonl", canonicalDump(Json{{"label", entry.label}, {"beforeHeight", entry.beforeHeight}}));
}

void ChainStore::writeMempool(const std::vector<Transaction>& txs) const {
  std::string content;
  for (const auto& tx : txs) content += canonicalDump(tx.toJson()) + "\n";
  writeFileAtomic(dir_ / "mempool.jsonl", content);
}

std::vector<Block> ChainStore::readBlocks(std::optional<ValidationFailure>* decodeFailure) const {
  std::vector<Block> blocks;
  auto lines = readLines(chainFile());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      blocks.push_back(Block::fromJson(canonicalParse(lines[i])));
    } catch (const Error& e) {
      if (decodeFailure) *decodeFailure = ValidationFailure{i, "decode", e.what()};
      else throw;
      break;
    }
  }
  return blocks;
}

std::vector<Receipt> ChainStore::readReceipts() const {
  std::vector<Receipt> out;
  for (const auto& line : readLines(receiptsFile())) out.push_back(Receipt::fromJson(canonicalParse(line)));
  return out;
}

std::vector<AccountJournalEntry> ChainStore::readAccounts() const {
  std::vector<AccountJournalEntry> out;
  for (const auto& line : readLines(dir_ / "accounts.jsonl")) {
    auto j = canonicalParse(line);
    out.push_back({json::str(j, "label"), json::u64(j, "beforeHeight")});
  }
  return out;
}

std::vector<Transaction> ChainStore::readMempool() const {
  std::vector<Transaction> out;
  for (const auto& line : readLines(dir_ / "mempool.jsonl")) out.push_back(Transaction::fromJson(canonicalParse(line)));
  return out;
}

}  // namespace dash::ledger
