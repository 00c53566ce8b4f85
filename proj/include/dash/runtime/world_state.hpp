#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dash/bytes.hpp"
#include "dash/hash.hpp"

namespace dash::runtime {

enum class AccountKind { EOA, SCA };

struct ContractTypeId {
  std::string typeId;
  std::uint32_t version = 1;

  auto operator<=>(const ContractTypeId&) const = default;
  std::string str() const { return typeId + "@v" + std::to_string(version); }
};

struct Account {
  Address address;
  AccountKind kind = AccountKind::EOA;
  std::uint64_t balance = 0;
  std::uint64_t nonce = 0;
  std::string label;                          // EOA only
  std::optional<ContractTypeId> contractType;  // SCA only
  std::map<std::string, Json, std::less<>> storage;

  Json toJson() const;
};

/// First 20 bytes of sha256("eoa" || label).
Address eoaAddress(std::string_view label);
/// First 20 bytes of sha256("sca" || creator || big-endian u64 nonce).
Address contractAddress(const Address& creator, std::uint64_t creatorNonce);

/// Accounts keyed by address. Mutations made while a journal is open are
/// recorded so they can be undone back to any checkpoint.
class WorldState {
 public:
  bool exists(const Address& a) const { return accounts_.contains(a); }
  const Account* find(const Address& a) const;
  const Account& get(const Address& a) const;  // throws NotFound
  std::optional<Address> eoaByLabel(std::string_view label) const;
  std::size_t size() const { return accounts_.size(); }
  const std::map<Address, Account>& accounts() const { return accounts_; }

  /// Off-chain account creation; not journaled. Throws DuplicateLabel.
  Address createEOA(const std::string& label, std::uint64_t balance);

  void createContractAccount(const Address& a, ContractTypeId type);
  void setBalance(const Address& a, std::uint64_t balance);
  void setNonce(const Address& a, std::uint64_t nonce);
  void store(const Address& a, const std::string& key, Json value);
  std::optional<Json> load(const Address& a, std::string_view key) const;

  /// Sum of canonical value lengths for keys starting with prefix.
  std::size_t storageBytes(const Address& a, std::string_view prefix = {}) const;

  void openJournal();
  void closeJournal();  // keeps the changes
  std::size_t checkpoint() const { return journal_.size(); }
  void rollback(std::size_t checkpoint);
  bool journaling() const { return journalDepth_ > 0; }

  Json toJson() const;
  Digest stateRoot() const { return hashCanonical(toJson()); }

 private:
  Account& mut(const Address& a);
  void record(std::function<void(WorldState&)> undo);

  std::map<Address, Account> accounts_;
  std::map<std::string, Address, std::less<>> labels_;
  std::vector<std::function<void(WorldState&)>> journal_;
  int journalDepth_ = 0;
};

}  // namespace dash::runtime
