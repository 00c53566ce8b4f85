#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dash/bytes.hpp"
#include "dash/hash.hpp"

namespace dash::service {

enum class Role { Patient, Provider, Admin };
std::string_view toString(Role r);
Role parseRole(std::string_view s);

struct Identity {
  std::string apiKey;
  Role role = Role::Patient;
  std::string eoaLabel;
  Address address;
  std::string patientId;        // patients
  std::string providerId;       // providers
  std::string displayName;
  std::optional<Address> providerAccount;

  Json toJson() const;           // includes the key
  Json publicJson() const;       // without it
  static Identity fromJson(const Json& j);
};

/// Keys are derived from the admin key and the EOA label, so a replayed
/// scenario sees the same keys on every run.
std::string deriveApiKey(const std::string& adminKey, const std::string& label);

class IdentityStore {
 public:
  explicit IdentityStore(std::optional<std::filesystem::path> file = std::nullopt);

  void add(const Identity& id);  // DuplicateLabel on key or label reuse
  std::optional<Identity> byKey(const std::string& apiKey) const;
  std::optional<Identity> byLabel(const std::string& label) const;
  std::optional<Identity> byPatient(const std::string& patientId) const;
  std::optional<Identity> byProvider(const std::string& providerId) const;
  std::optional<Identity> byAddress(const Address& address) const;
  std::vector<Identity> all() const;

 private:
  std::optional<std::filesystem::path> file_;
  mutable std::mutex mu_;
  std::vector<Identity> ids_;
  std::map<std::string, std::size_t> byKey_;
  std::map<std::string, std::size_t> byLabel_;
};

}  // namespace dash::service
