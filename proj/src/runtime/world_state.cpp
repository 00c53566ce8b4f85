#include "dash/runtime/world_state.hpp"

#include "dash/error.hpp"

namespace dash::runtime {

Json Account::toJson() const {
  Json j{{"address", address.hex()},
         {"kind", kind == AccountKind::EOA ? "EOA" : "SCA"},
         {"balance", balance},
         {"nonce", nonce}};
  if (kind == AccountKind::EOA) {
    j["label"] = label;
  } else {
    j["contractType"] = Json{{"typeId", contractType->typeId}, {"version", contractType->version}};
    Json s = Json::object();
    for (const auto& [k, v] : storage) s[k] = v;
    j["storage"] = std::move(s);
  }
  return j;
}

Address eoaAddress(std::string_view label) { return Address::fromDigest(sha256("eoa" + std::string(label))); }

Address contractAddress(const Address& creator, std::uint64_t creatorNonce) {
  Bytes preimage{'s', 'c', 'a'};
  preimage.insert(preimage.end(), creator.bytes.begin(), creator.bytes.end());
  for (int shift = 56; shift >= 0; shift -= 8) preimage.push_back(static_cast<std::uint8_t>(creatorNonce >> shift));
  return Address::fromDigest(sha256(preimage));
}

const Account* WorldState::find(const Address& a) const {
  auto it = accounts_.find(a);
  return it == accounts_.end() ? nullptr : &it->second;
}

const Account& WorldState::get(const Address& a) const {
  if (const auto* acc = find(a)) return *acc;
  fail(ErrorCode::NotFound, "no account " + a.hex());
}

Account& WorldState::mut(const Address& a) {
  auto it = accounts_.find(a);
  if (it == accounts_.end()) fail(ErrorCode::NotFound, "no account " + a.hex());
  return it->second;
}

std::optional<Address> WorldState::eoaByLabel(std::string_view label) const {
  auto it = labels_.find(label);
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

Address WorldState::createEOA(const std::string& label, std::uint64_t balance) {
  if (labels_.contains(label)) fail(ErrorCode::DuplicateLabel, label);
  auto addr = eoaAddress(label);
  if (accounts_.contains(addr)) fail(ErrorCode::DuplicateLabel, "address collision for " + label);
  Account acc;
  acc.address = addr;
  acc.kind = AccountKind::EOA;
  acc.balance = balance;
  acc.label = label;
  accounts_.emplace(addr, std::move(acc));
  labels_.emplace(label, addr);
  return addr;
}

void WorldState::record(std::function<void(WorldState&)> undo) {
  if (journalDepth_ > 0) journal_.push_back(std::move(undo));
}

void WorldState::createContractAccount(const Address& a, ContractTypeId type) {
  if (accounts_.contains(a)) fail(ErrorCode::InvalidArgument, "account exists " + a.hex());
  Account acc;
  acc.address = a;
  acc.kind = AccountKind::SCA;
  acc.contractType = std::move(type);
  accounts_.emplace(a, std::move(acc));
  record([a](WorldState& s) { s.accounts_.erase(a); });
}

void WorldState::setBalance(const Address& a, std::uint64_t balance) {
  auto& acc = mut(a);
  record([a, old = acc.balance](WorldState& s) { s.accounts_.at(a).balance = old; });
  acc.balance = balance;
}

void WorldState::setNonce(const Address& a, std::uint64_t nonce) {
  auto& acc = mut(a);
  record([a, old = acc.nonce](WorldState& s) { s.accounts_.at(a).nonce = old; });
  acc.nonce = nonce;
}

void WorldState::store(const Address& a, const std::string& key, Json value) {
  auto& acc = mut(a);
  if (acc.kind != AccountKind::SCA) fail(ErrorCode::NotAContract, a.hex());
  auto it = acc.storage.find(key);
  if (it == acc.storage.end()) {
    record([a, key](WorldState& s) { s.accounts_.at(a).storage.erase(key); });
    acc.storage.emplace(key, std::move(value));
  } else {
    record([a, key, old = it->second](WorldState& s) { s.accounts_.at(a).storage.find(key)->second = old; });
    it->second = std::move(value);
  }
}

std::optional<Json> WorldState::load(const Address& a, std::string_view key) const {
  const auto* acc = find(a);
  if (!acc) return std::nullopt;
  auto it = acc->storage.find(key);
  if (it == acc->storage.end()) return std::nullopt;
  return it->second;
}

std::size_t WorldState::storageBytes(const Address& a, std::string_view prefix) const {
  const auto* acc = find(a);
  if (!acc) return 0;
  std::size_t total = 0;
  for (auto it = acc->storage.lower_bound(prefix); it != acc->storage.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    total += canonicalDump(it->second).size();
  }
  return total;
}

void WorldState::openJournal() { ++journalDepth_; }

void WorldState::closeJournal() {
  if (journalDepth_ > 0 && --journalDepth_ == 0) journal_.clear();
}

void WorldState::rollback(std::size_t cp) {
  while (journal_.size() > cp) {
    auto undo = std::move(journal_.back());
    journal_.pop_back();
    undo(*this);
  }
}

Json WorldState::toJson() const {
  Json out = Json::array();
  for (const auto& [addr, acc] : accounts_) out.push_back(acc.toJson());
  return out;
}

}  // namespace dash::runtime
