#include "dash/service/identity.hpp"

#include "dash/error.hpp"
#include "dash/json_util.hpp"
#include "dash/ledger/chain_store.hpp"

namespace dash::service {

std::string_view toString(Role r) {
  switch (r) {
    case Role::Patient: return "patient";
    case Role::Provider: return "provider";
    case Role::Admin: return "admin";
  }
  return "unknown";
}

Role parseRole(std::string_view s) {
  if (s == "patient") return Role::Patient;
  if (s == "provider") return Role::Provider;
  if (s == "admin") return Role::Admin;
  fail(ErrorCode::Corrupt, "unknown role '" + std::string(s) + "'");
}

Json Identity::publicJson() const {
  Json j{{"role", toString(role)},
         {"eoaLabel", eoaLabel},
         {"address", address.hex()},
         {"displayName", displayName}};
  if (!patientId.empty()) j["patientId"] = patientId;
  if (!providerId.empty()) j["providerId"] = providerId;
  if (providerAccount) j["providerAccount"] = providerAccount->hex();
  return j;
}

Json Identity::toJson() const {
  Json j = publicJson();
  j["apiKey"] = apiKey;
  return j;
}

Identity Identity::fromJson(const Json& j) {
  Identity id;
  id.apiKey = json::str(j, "apiKey");
  id.role = parseRole(json::str(j, "role"));
  id.eoaLabel = json::str(j, "eoaLabel");
  id.address = json::address(j, "address");
  id.displayName = json::str(j, "displayName");
  if (j.contains("patientId")) id.patientId = json::str(j, "patientId");
  if (j.contains("providerId")) id.providerId = json::str(j, "providerId");
  if (j.contains("providerAccount")) id.providerAccount = json::address(j, "providerAccount");
  return id;
}

std::string deriveApiKey(const std::string& adminKey, const std::string& label) {
  return sha256("apikey\n" + adminKey + "\n" + label).hex().substr(0, 32);
}

IdentityStore::IdentityStore(std::optional<std::filesystem::path> file) : file_(std::move(file)) {
  if (!file_) return;
  for (const auto& line : ledger::readLines(*file_)) {
    auto id = Identity::fromJson(canonicalParse(line));
    byKey_[id.apiKey] = ids_.size();
    byLabel_[id.eoaLabel] = ids_.size();
    ids_.push_back(std::move(id));
  }
}

void IdentityStore::add(const Identity& id) {
  std::lock_guard lock(mu_);
  if (byKey_.contains(id.apiKey) || byLabel_.contains(id.eoaLabel))
    fail(ErrorCode::DuplicateLabel, id.eoaLabel);
  if (file_) ledger::appendLine(*file_, canonicalDump(id.toJson()));
  byKey_[id.apiKey] = ids_.size();
  byLabel_[id.eoaLabel] = ids_.size();
  ids_.push_back(id);
}

std::optional<Identity> IdentityStore::byKey(const std::string& apiKey) const {
  std::lock_guard lock(mu_);
  auto it = byKey_.find(apiKey);
  if (it == byKey_.end()) return std::nullopt;
  return ids_[it->second];
}

std::optional<Identity> IdentityStore::byLabel(const std::string& label) const {
  std::lock_guard lock(mu_);
  auto it = byLabel_.find(label);
  if (it == byLabel_.end()) return std::nullopt;
  return ids_[it->second];
}

std::optional<Identity> IdentityStore::byPatient(const std::string& patientId) const {
  std::lock_guard lock(mu_);
  for (const auto& id : ids_)
    if (id.role == Role::Patient && id.patientId == patientId) return id;
  return std::nullopt;
}

std::optional<Identity> IdentityStore::byProvider(const std::string& providerId) const {
  std::lock_guard lock(mu_);
  for (const auto& id : ids_)
    if (id.role == Role::Provider && id.providerId == providerId) return id;
  return std::nullopt;
}

std::optional<Identity> IdentityStore::byAddress(const Address& address) const {
  std::lock_guard lock(mu_);
  for (const auto& id : ids_)
    if (id.address == address) return id;
  return std::nullopt;
}

std::vector<Identity> IdentityStore::all() const {
  std::lock_guard lock(mu_);
  return ids_;
}

}  // namespace dash::service
