#include "dash/pubsub/dispatcher.hpp"

#include <algorithm>

#include "dash/error.hpp"
#include "dash/json_util.hpp"
#include "dash/ledger/chain_store.hpp"

namespace dash::pubsub {

namespace fs = std::filesystem;

bool Filter::matches(const ledger::Event& e) const {
  if (!valid()) return false;
  if (account && *account != e.emitter) return false;
  if (topic && *topic != e.topic) return false;
  return true;
}

Json Filter::toJson() const {
  Json j = Json::object();
  if (account) j["account"] = account->hex();
  if (topic) j["topic"] = *topic;
  if (wildcard) j["wildcard"] = true;
  return j;
}

Filter Filter::fromJson(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidFilter, "filter must be an object");
  Filter f;
  for (const auto& [key, value] : j.items()) {
    if (key == "account") {
      Address a;
      if (!value.is_string() || !Address::tryFromHex(value.get<std::string>(), a))
        fail(ErrorCode::InvalidFilter, "filter.account is not an address");
      f.account = a;
    } else if (key == "topic") {
      if (!value.is_string() || value.get<std::string>().empty())
        fail(ErrorCode::InvalidFilter, "filter.topic must be a non-empty string");
      f.topic = value.get<std::string>();
    } else if (key == "wildcard") {
      if (!value.is_boolean()) fail(ErrorCode::InvalidFilter, "filter.wildcard must be a boolean");
      f.wildcard = value.get<bool>();
    } else {
      fail(ErrorCode::InvalidFilter, "unknown filter field '" + key + "'");
    }
  }
  if (!f.valid()) fail(ErrorCode::InvalidFilter, "empty filter; set wildcard explicitly to match everything");
  return f;
}

Json Subscription::toJson() const {
  Json j{{"id", id},
         {"subscriberId", subscriberId},
         {"filter", filter.toJson()},
         {"createdAtHeight", createdAtHeight}};
  j["removedAtHeight"] = removedAtHeight ? Json(*removedAtHeight) : Json(nullptr);
  return j;
}

Subscription Subscription::fromJson(const Json& j) {
  Subscription s;
  s.id = json::str(j, "id");
  s.subscriberId = json::str(j, "subscriberId");
  s.filter = Filter::fromJson(json::at(j, "filter"));
  s.createdAtHeight = json::u64(j, "createdAtHeight");
  if (auto it = j.find("removedAtHeight"); it != j.end() && !it->is_null())
    s.removedAtHeight = json::u64(j, "removedAtHeight");
  return s;
}

Json Notification::toJson() const {
  return Json{{"subscriptionId", subscriptionId}, {"subscriberId", subscriberId},
              {"event", event.toJson()},           {"blockHeight", blockHeight},
              {"indexInBlock", indexInBlock},      {"deliverySeq", deliverySeq}};
}

Notification Notification::fromJson(const Json& j) {
  Notification n;
  n.subscriptionId = json::str(j, "subscriptionId");
  n.subscriberId = json::str(j, "subscriberId");
  n.event = ledger::Event::fromJson(json::at(j, "event"));
  n.blockHeight = json::u64(j, "blockHeight");
  n.indexInBlock = static_cast<std::uint32_t>(json::u64(j, "indexInBlock"));
  n.deliverySeq = json::u64(j, "deliverySeq");
  return n;
}

Dispatcher::Dispatcher(DispatcherOptions options) : options_(std::move(options)) {
  if (!options_.dir) return;
  const fs::path& dir = *options_.dir;
  fs::create_directories(dir / "feeds");

  if (fs::exists(dir / "subscriptions.json")) {
    Json doc = canonicalParse(ledger::readLines(dir / "subscriptions.json").at(0));
    nextSubId_ = json::u64(doc, "nextId");
    for (const auto& s : json::at(doc, "subscribers")) subscribers_.insert(s.get<std::string>());
    for (const auto& s : json::at(doc, "subscriptions")) subs_.push_back(Subscription::fromJson(s));
  }
  if (fs::exists(dir / "cursor.json")) {
    Json doc = canonicalParse(ledger::readLines(dir / "cursor.json").at(0));
    cursor_ = json::i64(doc, "lastDispatched");
  }
  for (const auto& subscriber : subscribers_) {
    fs::path file = feedFile(subscriber);
    if (!fs::exists(file)) continue;
    auto& feed = feeds_[subscriber];
    bool truncated = false;
    for (const auto& line : ledger::readLines(file)) {
      Notification n;
      try {
        n = Notification::fromJson(canonicalParse(line));
      } catch (const Error&) {
        truncated = true;  // torn final write
        break;
      }
      if (static_cast<std::int64_t>(n.blockHeight) > cursor_) {
        truncated = true;
        break;
      }
      feed.push_back(std::move(n));
    }
    if (truncated) {
      std::string content;
      for (const auto& n : feed) content += canonicalDump(n.toJson()) + "\n";
      ledger::writeFileAtomic(file, content);
    }
  }
  rebuildIndex();
}

fs::path Dispatcher::feedFile(const std::string& subscriberId) const {
  auto bytes = std::span(reinterpret_cast<const std::uint8_t*>(subscriberId.data()), subscriberId.size());
  return *options_.dir / "feeds" / (toHex(bytes) + ".jsonl");
}

void Dispatcher::rebuildIndex() {
  subIndex_.clear();
  byAccount_.clear();
  byTopic_.clear();
  wildcard_.clear();
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    const auto& s = subs_[i];
    subIndex_[s.id] = i;
    if (s.filter.account)
      byAccount_[*s.filter.account].push_back(i);
    else if (s.filter.topic)
      byTopic_[*s.filter.topic].push_back(i);
    else
      wildcard_.push_back(i);
  }
}

void Dispatcher::persistSubscriptions() const {
  if (!options_.dir) return;
  Json doc{{"nextId", nextSubId_}, {"subscribers", Json::array()}, {"subscriptions", Json::array()}};
  for (const auto& s : subscribers_) doc["subscribers"].push_back(s);
  for (const auto& s : subs_) doc["subscriptions"].push_back(s.toJson());
  ledger::writeFileAtomic(*options_.dir / "subscriptions.json", canonicalDump(doc) + "\n");
}

void Dispatcher::registerSubscriber(const std::string& subscriberId) {
  if (subscriberId.empty()) fail(ErrorCode::InvalidArgument, "empty subscriber id");
  std::lock_guard lock(mu_);
  if (subscribers_.insert(subscriberId).second) persistSubscriptions();
}

bool Dispatcher::knownSubscriber(const std::string& subscriberId) const {
  std::lock_guard lock(mu_);
  return subscribers_.contains(subscriberId);
}

std::string Dispatcher::subscribe(const std::string& subscriberId, const Filter& filter,
                                  std::uint64_t currentHeight) {
  if (!filter.valid()) fail(ErrorCode::InvalidFilter, "empty filter");
  std::lock_guard lock(mu_);
  if (!subscribers_.contains(subscriberId)) fail(ErrorCode::UnknownSubscriber, subscriberId);
  Subscription s;
  s.id = "sub-" + std::to_string(nextSubId_++);
  s.subscriberId = subscriberId;
  s.filter = filter;
  s.createdAtHeight = currentHeight;
  subs_.push_back(s);
  rebuildIndex();
  persistSubscriptions();
  return s.id;
}

void Dispatcher::unsubscribe(const std::string& subscriptionId, std::uint64_t currentHeight) {
  std::lock_guard lock(mu_);
  auto it = subIndex_.find(subscriptionId);
  if (it == subIndex_.end()) fail(ErrorCode::UnknownSubscription, subscriptionId);
  auto& s = subs_[it->second];
  if (s.removedAtHeight) return;
  s.removedAtHeight = std::max(currentHeight, s.createdAtHeight);
  persistSubscriptions();
}

std::uint64_t Dispatcher::dispatchBlock(std::uint64_t height, std::span<const ledger::Receipt> receipts) {
  std::unique_lock lock(mu_);
  if (static_cast<std::int64_t>(height) != cursor_ + 1)
    fail(ErrorCode::OutOfOrderDispatch,
         "expected height " + std::to_string(cursor_ + 1) + ", got " + std::to_string(height));

  std::map<std::string, std::uint64_t> nextSeq;
  auto seqFor = [&](const std::string& subscriber) -> std::uint64_t& {
    auto it = nextSeq.find(subscriber);
    if (it == nextSeq.end()) {
      auto f = feeds_.find(subscriber);
      it = nextSeq.emplace(subscriber, f == feeds_.end() ? 0 : f->second.size()).first;
    }
    return it->second;
  };

  std::vector<Notification> out;
  std::vector<std::size_t> candidates;
  for (const auto& receipt : receipts) {
    for (const auto& event : receipt.events) {
      candidates.clear();
      if (auto a = byAccount_.find(event.emitter); a != byAccount_.end())
        candidates.insert(candidates.end(), a->second.begin(), a->second.end());
      if (auto t = byTopic_.find(event.topic); t != byTopic_.end())
        candidates.insert(candidates.end(), t->second.begin(), t->second.end());
      candidates.insert(candidates.end(), wildcard_.begin(), wildcard_.end());
      std::sort(candidates.begin(), candidates.end());

      std::set<std::string> served;
      for (std::size_t idx : candidates) {
        const auto& s = subs_[idx];
        if (!s.activeFor(height) || !s.filter.matches(event)) continue;
        if (options_.dedupPerSubscriber && !served.insert(s.subscriberId).second) continue;
        Notification n;
        n.subscriptionId = s.id;
        n.subscriberId = s.subscriberId;
        n.event = event;
        n.blockHeight = height;
        n.indexInBlock = receipt.indexInBlock;
        n.deliverySeq = seqFor(s.subscriberId)++;
        out.push_back(std::move(n));
      }
    }
  }

  if (options_.dir) {
    std::size_t appended = 0;
    for (const auto& n : out) {
      if (crashAfter_ && appended >= *crashAfter_) throw SimulatedCrash();
      ledger::appendLine(feedFile(n.subscriberId), canonicalDump(n.toJson()));
      ++appended;
    }
    if (crashAfter_ && appended >= *crashAfter_) throw SimulatedCrash();
    ledger::writeFileAtomic(*options_.dir / "cursor.json",
                            canonicalDump(Json{{"lastDispatched", static_cast<std::int64_t>(height)}}) + "\n");
  }

  for (auto& n : out) feeds_[n.subscriberId].push_back(std::move(n));
  cursor_ = static_cast<std::int64_t>(height);
  work_ += out.size();
  lock.unlock();
  cv_.notify_all();
  return out.size();
}

namespace {

std::vector<Notification> after(const std::vector<Notification>& feed, std::int64_t afterSeq) {
  std::size_t start = afterSeq < 0 ? 0 : static_cast<std::size_t>(afterSeq) + 1;
  if (start >= feed.size()) return {};
  return {feed.begin() + static_cast<std::ptrdiff_t>(start), feed.end()};
}

}  // namespace

std::vector<Notification> Dispatcher::poll(const std::string& subscriberId, std::int64_t afterSeq) const {
  std::lock_guard lock(mu_);
  if (!subscribers_.contains(subscriberId)) fail(ErrorCode::UnknownSubscriber, subscriberId);
  auto it = feeds_.find(subscriberId);
  return it == feeds_.end() ? std::vector<Notification>{} : after(it->second, afterSeq);
}

std::vector<Notification> Dispatcher::pollWait(const std::string& subscriberId, std::int64_t afterSeq,
                                               std::chrono::milliseconds wait) const {
  std::unique_lock lock(mu_);
  if (!subscribers_.contains(subscriberId)) fail(ErrorCode::UnknownSubscriber, subscriberId);
  auto ready = [&] {
    auto it = feeds_.find(subscriberId);
    return it != feeds_.end() && static_cast<std::int64_t>(it->second.size()) > afterSeq + 1;
  };
  cv_.wait_for(lock, wait, ready);
  auto it = feeds_.find(subscriberId);
  return it == feeds_.end() ? std::vector<Notification>{} : after(it->second, afterSeq);
}

std::int64_t Dispatcher::cursor() const {
  std::lock_guard lock(mu_);
  return cursor_;
}

std::uint64_t Dispatcher::workCounter() const {
  std::lock_guard lock(mu_);
  return work_;
}

void Dispatcher::resetWorkCounter() {
  std::lock_guard lock(mu_);
  work_ = 0;
}

std::vector<Subscription> Dispatcher::subscriptions() const {
  std::lock_guard lock(mu_);
  return subs_;
}

std::optional<Subscription> Dispatcher::subscription(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = subIndex_.find(id);
  if (it == subIndex_.end()) return std::nullopt;
  return subs_[it->second];
}

void Dispatcher::crashAfterAppends(std::optional<std::size_t> n) {
  std::lock_guard lock(mu_);
  crashAfter_ = n;
}

void PollingBaseline::watch(const std::string& providerId, const Address& account) {
  watched_[providerId].push_back(account);
}

std::uint64_t PollingBaseline::scanBlock(std::uint64_t, std::span<const ledger::Receipt> receipts) {
  std::uint64_t scans = 0;
  for (const auto& [provider, accounts] : watched_) {
    for (const auto& account : accounts) {
      ++scans;
      for (const auto& r : receipts)
        for (const auto& e : r.events)
          if (e.emitter == account) ++found_;
    }
  }
  scans_ += scans;
  return scans;
}

}  // namespace dash::pubsub
