#include "dash/ledger/mempool.hpp"

#include <algorithm>

namespace dash::ledger {

void Mempool::push(Transaction tx) {
  std::lock_guard lk(mu_);
  pushLocked(std::move(tx));
}

void Mempool::pushLocked(Transaction tx) {
  ++perSender_[tx.sender];
  queue_.push_back(std::move(tx));
}

std::vector<Transaction> Mempool::drain(std::size_t max) {
  std::lock_guard lk(mu_);
  std::vector<Transaction> out;
  while (!queue_.empty() && out.size() < max) {
    auto& tx = queue_.front();
    if (auto it = perSender_.find(tx.sender); it != perSender_.end() && --it->second == 0) perSender_.erase(it);
    out.push_back(std::move(tx));
    queue_.pop_front();
  }
  return out;
}

std::vector<Transaction> Mempool::snapshot() const {
  std::lock_guard lk(mu_);
  return {queue_.begin(), queue_.end()};
}

std::size_t Mempool::size() const {
  std::lock_guard lk(mu_);
  return queue_.size();
}

std::size_t Mempool::pendingFor(const Address& sender) const {
  std::lock_guard lk(mu_);
  return pendingForLocked(sender);
}

std::size_t Mempool::pendingForLocked(const Address& sender) const {
  auto it = perSender_.find(sender);
  return it == perSender_.end() ? 0 : it->second;
}

bool Mempool::contains(const Digest& id) const {
  std::lock_guard lk(mu_);
  return std::any_of(queue_.begin(), queue_.end(), [&](const Transaction& tx) { return tx.id == id; });
}

void Mempool::clear() {
  std::lock_guard lk(mu_);
  queue_.clear();
  perSender_.clear();
}

}  // namespace dash::ledger
