#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "dash/clock.hpp"
#include "dash/ledger/block.hpp"
#include "dash/ledger/chain_config.hpp"
#include "dash/ledger/chain_store.hpp"
#include "dash/ledger/mempool.hpp"
#include "dash/ledger/receipt.hpp"
#include "dash/ledger/validation.hpp"
#include "dash/runtime/runtime.hpp"
#include "dash/runtime/world_state.hpp"

namespace dash::ledger {

/// Single-node chain: mempool, miner, world state and receipts.
///
/// Mining and account creation are exclusive writers; submissions are
/// serialized through the mempool; lookups run under a shared lock.
class Blockchain {
 public:
  using CommitHook = std::function<void(const Block&, const std::vector<Receipt>&)>;
  using GenesisSetup = std::function<Json(Blockchain&)>;

  /// In-memory chain when dataDir is empty.
  Blockchain(ChainConfig config, const runtime::ContractTypeRegistry& types, std::shared_ptr<Clock> clock,
             std::optional<std::filesystem::path> dataDir = std::nullopt);

  /// Reopens a data directory: replays every block from genesis, checks the
  /// regenerated receipts against the stored ones and validates the chain.
  static std::unique_ptr<Blockchain> open(const std::filesystem::path& dataDir,
                                          const runtime::ContractTypeRegistry& types, std::shared_ptr<Clock> clock);

  /// Validates the on-disk chain without replaying execution.
  static ValidationReport validateDirectory(const std::filesystem::path& dataDir);

  /// Creates the miner and admin EOAs, runs setup (which submits system
  /// transactions and returns their addresses) and mines block 0.
  void initGenesis(const GenesisSetup& setup = {});

  Address createEOA(const std::string& label);

  /// Fills in the sender's next nonce, the clock timestamp and the id.
  Transaction prepare(const Address& sender, Payload payload, std::optional<std::uint64_t> gasLimit = std::nullopt);
  Digest submit(const Transaction& tx);
  /// prepare + submit under one lock.
  Digest submit(const Address& sender, Payload payload, std::optional<std::uint64_t> gasLimit = std::nullopt);

  Block mineBlock(std::optional<std::size_t> maxTxs = std::nullopt);
  /// Mines until the given transaction is committed; returns its receipt.
  Receipt settle(const Digest& txId);

  ValidationReport validate() const;
  Receipt receipt(const Digest& txId) const;  // NotFound when pending or unknown
  std::optional<Receipt> findReceipt(const Digest& txId) const;
  Block block(std::uint64_t height) const;     // NotFound
  std::vector<Receipt> blockReceipts(std::uint64_t height) const;
  std::uint64_t length() const;                // number of committed blocks
  std::vector<Block> blocks() const;
  std::vector<Receipt> allReceipts() const;
  std::size_t receiptCount() const;

  runtime::CallResult staticCall(const Address& caller, const Address& target, std::string_view function,
                                 const Json& args);

  /// Copy of an account, if present.
  std::optional<runtime::Account> account(const Address& a) const;
  std::optional<Address> eoaByLabel(const std::string& label) const;
  /// Runs f with shared access to the world state.
  template <typename F>
  auto withState(F&& f) const {
    std::shared_lock lk(mu_);
    return f(static_cast<const runtime::WorldState&>(state_));
  }

  const ChainConfig& config() const { return config_; }
  const Address& miner() const { return miner_; }
  const Address& admin() const { return admin_; }
  const Mempool& mempool() const { return mempool_; }
  const runtime::Runtime& runtime() const { return runtime_; }
  std::vector<std::uint64_t> powAttempts() const;

  void onCommit(CommitHook hook);

 private:
  Block mineLocked(std::size_t maxTxs, bool allowEmpty);
  Digest submitLocked(const Transaction& tx);
  void applyBlockForReplay(const Block& block, std::vector<Receipt>& receipts);
  void indexBlock(const Block& block, std::vector<Receipt> receipts);

  ChainConfig config_;
  runtime::Runtime runtime_;
  std::shared_ptr<Clock> clock_;
  std::optional<ChainStore> store_;

  std::mutex mineMu_;   // serializes mine + commit hooks
  std::mutex storeMu_;  // mempool file rewrites
  mutable std::shared_mutex mu_;
  runtime::WorldState state_;
  Mempool mempool_;
  std::vector<Block> blocks_;
  std::vector<std::vector<Receipt>> receipts_;
  std::unordered_map<Digest, std::pair<std::uint64_t, std::uint32_t>> receiptIndex_;
  std::vector<std::uint64_t> powAttempts_;
  std::vector<CommitHook> hooks_;
  Address miner_;
  Address admin_;
  std::uint64_t lastTimestamp_ = 0;
};

}  // namespace dash::ledger
