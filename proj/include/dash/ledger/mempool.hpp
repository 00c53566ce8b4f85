#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <mutex>
#include <vector>

#include "dash/ledger/transaction.hpp"

namespace dash::ledger {

/// FIFO of submitted transactions. Submission is internally serialized.
class Mempool {
 public:
  void push(Transaction tx);
  std::vector<Transaction> drain(std::size_t max);
  std::vector<Transaction> snapshot() const;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::size_t pendingFor(const Address& sender) const;
  bool contains(const Digest& id) const;
  void clear();

  /// Returns the lock so callers can make check-then-push atomic.
  std::unique_lock<std::mutex> lock() const { return std::unique_lock(mu_); }
  void pushLocked(Transaction tx);
  std::size_t pendingForLocked(const Address& sender) const;

 private:
  mutable std::mutex mu_;
  std::deque<Transaction> queue_;
  std::map<Address, std::size_t> perSender_;
};

}  // namespace dash::ledger
