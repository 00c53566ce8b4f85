#include "dash/ledger/blockchain.hpp"

#include <algorithm>
#include <map>

#include "dash/error.hpp"

namespace dash::ledger {

Blockchain::Blockchain(ChainConfig config, const runtime::ContractTypeRegistry& types, std::shared_ptr<Clock> clock,
                       std::optional<std::filesystem::path> dataDir)
    : config_(std::move(config)), runtime_(types, config_.gas), clock_(std::move(clock)) {
  if (dataDir) store_.emplace(*dataDir);
  miner_ = runtime::eoaAddress(config_.minerLabel);
  admin_ = runtime::eoaAddress(config_.adminLabel);
}

void Blockchain::initGenesis(const GenesisSetup& setup) {
  std::lock_guard mine(mineMu_);
  {
    std::unique_lock lk(mu_);
    if (!blocks_.empty()) fail(ErrorCode::InvalidArgument, "chain already has a genesis block");
    if (store_ && store_->hasGenesis()) fail(ErrorCode::InvalidArgument, "data directory already initialized");
  }
  createEOA(config_.minerLabel);
  if (config_.adminLabel != config_.minerLabel) createEOA(config_.adminLabel);
  if (setup) config_.systemContracts = setup(*this);

  Block genesis;
  std::vector<Receipt> receipts;
  {
    std::unique_lock lk(mu_);
    genesis = mineLocked(std::max(config_.maxTxsPerBlock, mempool_.size()), true);
    receipts = receipts_.back();
  }
  for (const auto& r : receipts) {
    if (!r.ok()) fail(ErrorCode::Reverted, "genesis transaction failed: " + r.revertReason);
  }
  if (store_) store_->writeGenesis(config_);
  for (const auto& hook : hooks_) hook(genesis, receipts);
}

std::unique_ptr<Blockchain> Blockchain::open(const std::filesystem::path& dataDir,
                                             const runtime::ContractTypeRegistry& types,
                                             std::shared_ptr<Clock> clock) {
  ChainStore store(dataDir);
  auto config = store.readGenesis();

  std::optional<ValidationFailure> decodeFailure;
  auto blocks = store.readBlocks(&decodeFailure);
  if (decodeFailure) fail(ErrorCode::Corrupt, "block " + std::to_string(decodeFailure->height) + ": " + decodeFailure->detail);
  auto report = validateBlocks(blocks, config.difficulty);
  if (!report.valid)
    fail(ErrorCode::Corrupt, "chain invalid at height " + std::to_string(report.firstFailure->height) + " (" +
                                 report.firstFailure->rule + "): " + report.firstFailure->detail);

  std::unordered_map<Digest, std::string> stored;
  for (const auto& r : store.readReceipts()) stored[r.txId] = canonicalDump(r.toJson());

  auto chain = std::make_unique<Blockchain>(config, types, std::move(clock), dataDir);
  auto accounts = store.readAccounts();
  std::size_t nextAccount = 0;
  auto createUpTo = [&](std::uint64_t height) {
    while (nextAccount < accounts.size() && accounts[nextAccount].beforeHeight <= height) {
      if (accounts[nextAccount].beforeHeight < height) fail(ErrorCode::Corrupt, "account journal out of order");
      chain->state_.createEOA(accounts[nextAccount].label, config.faucetAmount);
      ++nextAccount;
    }
  };

  for (const auto& block : blocks) {
    createUpTo(block.header.height);
    std::vector<Receipt> receipts;
    chain->applyBlockForReplay(block, receipts);
    for (const auto& r : receipts) {
      auto it = stored.find(r.txId);
      if (it == stored.end() || it->second != canonicalDump(r.toJson()))
        fail(ErrorCode::Corrupt, "replayed receipt differs from stored receipt for tx " + r.txId.hex());
    }
    chain->indexBlock(block, std::move(receipts));
    chain->powAttempts_.push_back(block.header.powNonce + 1);
  }
  createUpTo(blocks.size());
  if (nextAccount != accounts.size()) fail(ErrorCode::Corrupt, "account journal refers to future blocks");

  std::shared_lock lk(chain->mu_);
  for (const auto& tx : store.readMempool()) chain->submitLocked(tx);
  return chain;
}

ValidationReport Blockchain::validateDirectory(const std::filesystem::path& dataDir) {
  ChainStore store(dataDir);
  ChainConfig config;
  try {
    config = store.readGenesis();
  } catch (const Error& e) {
    return ValidationReport::failure(0, "genesis", e.what());
  }
  std::optional<ValidationFailure> decodeFailure;
  auto blocks = store.readBlocks(&decodeFailure);
  if (decodeFailure) return {false, decodeFailure};
  if (blocks.empty()) return ValidationReport::failure(0, "genesis", "chain has no genesis block");
  auto report = validateBlocks(blocks, config.difficulty);
  if (!report.valid) return report;

  std::unordered_map<Digest, Receipt> receipts;
  try {
    for (auto& r : store.readReceipts()) receipts.emplace(r.txId, std::move(r));
  } catch (const Error& e) {
    return ValidationReport::failure(blocks.size() - 1, "receipts", e.what());
  }
  for (const auto& block : blocks) {
    for (std::uint32_t i = 0; i < block.transactions.size(); ++i) {
      auto it = receipts.find(block.transactions[i].id);
      if (it == receipts.end() || it->second.blockHeight != block.header.height || it->second.indexInBlock != i)
        return ValidationReport::failure(block.header.height, "receipts",
                                         "missing or misplaced receipt for tx " + block.transactions[i].id.hex());
      if (it->second.gasUsed > block.transactions[i].gasLimit)
        return ValidationReport::failure(block.header.height, "receipts", "gasUsed exceeds gasLimit");
    }
  }
  return report;
}

Address Blockchain::createEOA(const std::string& label) {
  std::unique_lock lk(mu_);
  auto addr = state_.createEOA(label, config_.faucetAmount);
  if (store_) store_->appendAccount({label, blocks_.size()});
  return addr;
}

Transaction Blockchain::prepare(const Address& sender, Payload payload, std::optional<std::uint64_t> gasLimit) {
  std::shared_lock lk(mu_);
  const auto* acc = state_.find(sender);
  if (!acc) fail(ErrorCode::UnknownSender, sender.hex());
  auto nonce = acc->nonce + mempool_.pendingFor(sender);
  return Transaction::make(sender, nonce, std::move(payload), gasLimit.value_or(config_.defaultGasLimit), clock_->now());
}

Digest Blockchain::submit(const Transaction& tx) {
  std::shared_lock lk(mu_);
  return submitLocked(tx);
}

Digest Blockchain::submit(const Address& sender, Payload payload, std::optional<std::uint64_t> gasLimit) {
  std::shared_lock lk(mu_);
  const auto* acc = state_.find(sender);
  if (!acc || acc->kind != runtime::AccountKind::EOA) fail(ErrorCode::UnknownSender, sender.hex());
  Transaction tx;
  {
    auto mlk = mempool_.lock();
    auto nonce = acc->nonce + mempool_.pendingForLocked(sender);
    try {
      tx = Transaction::make(sender, nonce, std::move(payload), gasLimit.value_or(config_.defaultGasLimit),
                             clock_->now());
    } catch (const Error& e) {
      fail(ErrorCode::MalformedTransaction, e.what());
    }
    mempool_.pushLocked(tx);
  }
  if (store_) {
    std::lock_guard slk(storeMu_);
    store_->writeMempool(mempool_.snapshot());
  }
  return tx.id;
}

Digest Blockchain::submitLocked(const Transaction& tx) {
  try {
    if (!tx.idMatches()) fail(ErrorCode::MalformedTransaction, "id does not match canonical digest");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedTransaction) throw;
    fail(ErrorCode::MalformedTransaction, e.what());
  }
  if (const auto* c = std::get_if<CreateContract>(&tx.payload); c && c->typeId.empty())
    fail(ErrorCode::MalformedTransaction, "empty typeId");
  if (const auto* c = std::get_if<CallContract>(&tx.payload); c && c->function.empty())
    fail(ErrorCode::MalformedTransaction, "empty function name");

  const auto* acc = state_.find(tx.sender);
  if (!acc || acc->kind != runtime::AccountKind::EOA) fail(ErrorCode::UnknownSender, tx.sender.hex());
  {
    auto mlk = mempool_.lock();
    auto expected = acc->nonce + mempool_.pendingForLocked(tx.sender);
    if (tx.senderNonce != expected)
      fail(ErrorCode::NonceMismatch,
           "got " + std::to_string(tx.senderNonce) + ", expected " + std::to_string(expected));
    mempool_.pushLocked(tx);
  }
  if (store_) {
    std::lock_guard slk(storeMu_);
    store_->writeMempool(mempool_.snapshot());
  }
  return tx.id;
}

Block Blockchain::mineBlock(std::optional<std::size_t> maxTxs) {
  std::lock_guard mine(mineMu_);
  Block block;
  std::vector<Receipt> receipts;
  {
    std::unique_lock lk(mu_);
    block = mineLocked(maxTxs.value_or(config_.maxTxsPerBlock), config_.allowEmptyBlocks);
    receipts = receipts_.back();
  }
  for (const auto& hook : hooks_) hook(block, receipts);
  return block;
}

Block Blockchain::mineLocked(std::size_t maxTxs, bool allowEmpty) {
  if (maxTxs == 0 && !allowEmpty) fail(ErrorCode::InvalidArgument, "maxTxs must be positive");
  if (mempool_.empty() && !allowEmpty) fail(ErrorCode::EmptyMempool, "no pending transactions");
  auto txs = mempool_.drain(maxTxs);

  runtime::BlockContext ctx{blocks_.size(), 0, 0};
  std::vector<Receipt> receipts;
  receipts.reserve(txs.size());
  std::vector<Digest> ids;
  for (std::uint32_t i = 0; i < txs.size(); ++i) {
    receipts.push_back(runtime_.apply(state_, txs[i], ctx, i));
    ids.push_back(txs[i].id);
  }
  runtime_.finalizeBlock(state_, ctx, miner_, config_.blockReward);

  Block block;
  block.header.height = blocks_.size();
  block.header.prevHash = blocks_.empty() ? Digest{} : blocks_.back().hash();
  block.header.txRoot = computeTxRoot(ids);
  block.header.difficulty = config_.difficulty;
  block.header.timestamp = std::max(clock_->now(), lastTimestamp_);
  block.transactions = std::move(txs);
  powAttempts_.push_back(solvePow(block.header));

  if (store_) {
    store_->appendBlock(block, receipts);
    std::lock_guard slk(storeMu_);
    store_->writeMempool(mempool_.snapshot());
  }
  indexBlock(block, std::move(receipts));
  return block;
}

void Blockchain::applyBlockForReplay(const Block& block, std::vector<Receipt>& receipts) {
  runtime::BlockContext ctx{block.header.height, 0, 0};
  for (std::uint32_t i = 0; i < block.transactions.size(); ++i)
    receipts.push_back(runtime_.apply(state_, block.transactions[i], ctx, i));
  runtime_.finalizeBlock(state_, ctx, miner_, config_.blockReward);
}

void Blockchain::indexBlock(const Block& block, std::vector<Receipt> receipts) {
  for (const auto& r : receipts) receiptIndex_[r.txId] = {r.blockHeight, r.indexInBlock};
  lastTimestamp_ = block.header.timestamp;
  blocks_.push_back(block);
  receipts_.push_back(std::move(receipts));
}

Receipt Blockchain::settle(const Digest& txId) {
  while (true) {
    if (auto r = findReceipt(txId)) return *r;
    if (!mempool_.contains(txId)) fail(ErrorCode::NotFound, "transaction " + txId.hex());
    mineBlock();
  }
}

ValidationReport Blockchain::validate() const {
  std::shared_lock lk(mu_);
  auto report = validateBlocks(blocks_, config_.difficulty);
  if (!report.valid) return report;
  for (std::size_t h = 0; h < blocks_.size(); ++h) {
    const auto& txs = blocks_[h].transactions;
    if (receipts_[h].size() != txs.size()) return ValidationReport::failure(h, "receipts", "receipt count mismatch");
    for (std::size_t i = 0; i < txs.size(); ++i) {
      if (receipts_[h][i].txId != txs[i].id || receipts_[h][i].gasUsed > txs[i].gasLimit)
        return ValidationReport::failure(h, "receipts", "receipt mismatch for tx " + txs[i].id.hex());
    }
  }
  return report;
}

std::optional<Receipt> Blockchain::findReceipt(const Digest& txId) const {
  std::shared_lock lk(mu_);
  auto it = receiptIndex_.find(txId);
  if (it == receiptIndex_.end()) return std::nullopt;
  return receipts_[it->second.first][it->second.second];
}

Receipt Blockchain::receipt(const Digest& txId) const {
  if (auto r = findReceipt(txId)) return *r;
  fail(ErrorCode::NotFound, "no committed transaction " + txId.hex());
}

Block Blockchain::block(std::uint64_t height) const {
  std::shared_lock lk(mu_);
  if (height >= blocks_.size()) fail(ErrorCode::NotFound, "no block at height " + std::to_string(height));
  return blocks_[height];
}

std::vector<Receipt> Blockchain::blockReceipts(std::uint64_t height) const {
  std::shared_lock lk(mu_);
  if (height >= receipts_.size()) fail(ErrorCode::NotFound, "no block at height " + std::to_string(height));
  return receipts_[height];
}

std::uint64_t Blockchain::length() const {
  std::shared_lock lk(mu_);
  return blocks_.size();
}

std::vector<Block> Blockchain::blocks() const {
  std::shared_lock lk(mu_);
  return blocks_;
}

std::vector<Receipt> Blockchain::allReceipts() const {
  std::shared_lock lk(mu_);
  std::vector<Receipt> out;
  for (const auto& rs : receipts_) out.insert(out.end(), rs.begin(), rs.end());
  return out;
}

std::size_t Blockchain::receiptCount() const {
  std::shared_lock lk(mu_);
  return receiptIndex_.size();
}

runtime::CallResult Blockchain::staticCall(const Address& caller, const Address& target, std::string_view function,
                                           const Json& args) {
  std::unique_lock lk(mu_);
  return runtime_.staticCall(state_, caller, target, function, args, config_.staticCallGasLimit, blocks_.size());
}

std::optional<runtime::Account> Blockchain::account(const Address& a) const {
  std::shared_lock lk(mu_);
  if (const auto* acc = state_.find(a)) return *acc;
  return std::nullopt;
}

std::optional<Address> Blockchain::eoaByLabel(const std::string& label) const {
  std::shared_lock lk(mu_);
  return state_.eoaByLabel(label);
}

std::vector<std::uint64_t> Blockchain::powAttempts() const {
  std::shared_lock lk(mu_);
  return powAttempts_;
}

void Blockchain::onCommit(CommitHook hook) {
  std::lock_guard mine(mineMu_);
  hooks_.push_back(std::move(hook));
}

}  // namespace dash::ledger
