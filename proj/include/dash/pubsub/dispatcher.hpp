#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dash/bytes.hpp"
#include "dash/ledger/event.hpp"
#include "dash/ledger/receipt.hpp"

namespace dash::pubsub {

/// Absent fields are wildcards; at least one field or the explicit
/// wildcard flag must be set.
struct Filter {
  std::optional<Address> account;
  std::optional<std::string> topic;
  bool wildcard = false;

  bool valid() const { return account || topic || wildcard; }
  bool matches(const ledger::Event& e) const;
  Json toJson() const;
  static Filter fromJson(const Json& j);  // throws InvalidFilter
  bool operator==(const Filter&) const = default;
};

struct Subscription {
  std::string id;
  std::string subscriberId;
  Filter filter;
  std::uint64_t createdAtHeight = 0;               // delivers blocks strictly after this
  std::optional<std::uint64_t> removedAtHeight;    // ... and up to this one, once unsubscribed

  bool activeFor(std::uint64_t height) const {
    return height > createdAtHeight && (!removedAtHeight || height <= *removedAtHeight);
  }
  Json toJson() const;
  static Subscription fromJson(const Json& j);
};

struct Notification {
  std::string subscriptionId;
  std::string subscriberId;
  ledger::Event event;
  std::uint64_t blockHeight = 0;
  std::uint32_t indexInBlock = 0;
  std::uint64_t deliverySeq = 0;

  Json toJson() const;
  static Notification fromJson(const Json& j);
  bool operator==(const Notification&) const = default;
};

struct SimulatedCrash : std::runtime_error {
  SimulatedCrash() : std::runtime_error("simulated crash during dispatch") {}
};

struct DispatcherOptions {
  /// One notification per (subscriber, event) even when several of the
  /// subscriber's filters match. Off: one per matching subscription.
  bool dedupPerSubscriber = true;
  /// Persistence directory: subscriptions.json, cursor.json, feeds/*.jsonl.
  std::optional<std::filesystem::path> dir;
};

/// Routes committed events to subscriber feeds, exactly once, in block order.
///
/// dispatchBlock is the single consumer of committed blocks. Feed writes for
/// a block land before the cursor moves; on restart, feed entries beyond the
/// cursor are discarded so the block can be dispatched again cleanly.
class Dispatcher {
 public:
  explicit Dispatcher(DispatcherOptions options = {});

  void registerSubscriber(const std::string& subscriberId);
  bool knownSubscriber(const std::string& subscriberId) const;

  /// currentHeight: height of the last committed block.
  std::string subscribe(const std::string& subscriberId, const Filter& filter, std::uint64_t currentHeight);
  void unsubscribe(const std::string& subscriptionId, std::uint64_t currentHeight);

  /// Requires height == cursor + 1. Returns the number of notifications delivered.
  std::uint64_t dispatchBlock(std::uint64_t height, std::span<const ledger::Receipt> receipts);

  /// Notifications with deliverySeq > afterSeq, ascending.
  std::vector<Notification> poll(const std::string& subscriberId, std::int64_t afterSeq) const;
  /// Like poll, but blocks up to `wait` for something new to arrive.
  std::vector<Notification> pollWait(const std::string& subscriberId, std::int64_t afterSeq,
                                     std::chrono::milliseconds wait) const;

  /// Height of the last dispatched block, or -1.
  std::int64_t cursor() const;
  std::uint64_t workCounter() const;
  void resetWorkCounter();
  std::vector<Subscription> subscriptions() const;
  std::optional<Subscription> subscription(const std::string& id) const;

  /// Fault injection: throw SimulatedCrash after this many feed appends.
  void crashAfterAppends(std::optional<std::size_t> n);

 private:
  void rebuildIndex();
  void persistSubscriptions() const;
  std::filesystem::path feedFile(const std::string& subscriberId) const;

  DispatcherOptions options_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::set<std::string> subscribers_;
  std::vector<Subscription> subs_;  // creation order
  std::map<std::string, std::size_t> subIndex_;
  std::map<Address, std::vector<std::size_t>> byAccount_;
  std::map<std::string, std::vector<std::size_t>> byTopic_;
  std::vector<std::size_t> wildcard_;
  std::map<std::string, std::vector<Notification>> feeds_;
  std::uint64_t nextSubId_ = 0;
  std::int64_t cursor_ = -1;
  std::uint64_t work_ = 0;
  std::optional<std::size_t> crashAfter_;
};

/// Baseline without pub/sub: every provider re-scans every watched account
/// on every block.
class PollingBaseline {
 public:
  void watch(const std::string& providerId, const Address& account);
  /// Returns the number of (provider, account) scans performed for this block.
  std::uint64_t scanBlock(std::uint64_t height, std::span<const ledger::Receipt> receipts);

  std::uint64_t scans() const { return scans_; }
  std::uint64_t eventsFound() const { return found_; }
  void reset() { scans_ = found_ = 0; }

 private:
  std::map<std::string, std::vector<Address>> watched_;
  std::uint64_t scans_ = 0;
  std::uint64_t found_ = 0;
};

}  // namespace dash::pubsub
