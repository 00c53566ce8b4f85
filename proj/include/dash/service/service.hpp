#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dash/contracts/dash_contracts.hpp"
#include "dash/error.hpp"
#include "dash/ledger/blockchain.hpp"
#include "dash/pubsub/dispatcher.hpp"
#include "dash/records/record_store.hpp"
#include "dash/runtime/contract.hpp"
#include "dash/service/config.hpp"
#include "dash/service/identity.hpp"

namespace dash::service {

/// Failure surfaced to API callers: HTTP status plus, when a transaction
/// was involved, its on-chain revert reason and id.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, std::string reason, std::string revertReason = {},
           std::optional<Digest> txId = std::nullopt);

  int status() const { return status_; }
  const std::string& code() const { return code_; }
  const std::string& reason() const { return reason_; }
  const std::string& revertReason() const { return revertReason_; }
  const std::optional<Digest>& txId() const { return txId_; }
  Json toJson() const;

  static ApiError fromError(const Error& e);
  static ApiError fromReceipt(const ledger::Receipt& r);

 private:
  int status_;
  std::string code_;
  std::string reason_;
  std::string revertReason_;
  std::optional<Digest> txId_;
};

struct OnboardRequest {
  std::string patientId;
  Json demographics;  // Patient resource
  Json plan;          // {payerName, planCode, coverageTier}
  Json extrinsic = Json{{"memberNumber", ""}, {"groupCode", ""}};
};

struct OnboardResult {
  Identity identity;
  Address account;
  std::optional<Digest> planRef;
  std::vector<std::pair<std::string, ledger::Receipt>> receipts;  // step name, receipt
};

struct WriteResult {
  ledger::Receipt receipt;
  std::uint64_t entryIndex = 0;
  Digest recordHash;
  records::StoragePointer pointer;
  Address account;
};

struct RecordView {
  std::uint64_t entryIndex = 0;
  Json entry;  // on-chain entry
  records::Resource resource;
};

/// Outcome of a single-transaction endpoint. receipt is empty when the
/// transaction is still pending (manual or batched mining).
struct TxOutcome {
  Digest txId;
  std::optional<ledger::Receipt> receipt;
};

/// Orchestrates the DASH workflows over one chain, record store and
/// dispatcher. Mutating flows are serialized; notification polls are not.
class DashService {
 public:
  explicit DashService(ServiceConfig config);
  ~DashService();

  DashService(const DashService&) = delete;
  DashService& operator=(const DashService&) = delete;

  const ServiceConfig& config() const { return config_; }
  ledger::Blockchain& chain() { return *chain_; }
  records::RecordStore& records() { return *records_; }
  pubsub::Dispatcher& dispatcher() { return *dispatcher_; }
  IdentityStore& identities() { return *identities_; }
  const contracts::SystemContracts& system() const { return system_; }
  const runtime::ContractTypeRegistry& types() const { return types_; }

  /// Throws ApiError(401) for an unknown key.
  Identity authenticate(const std::string& apiKey) const;
  Identity adminIdentity() const;

  OnboardResult onboardPatient(const Identity& caller, const OnboardRequest& req);
  Identity onboardProvider(const Identity& caller, const std::string& providerId, const std::string& name);

  WriteResult writeRecord(const Identity& caller, const std::string& patientId, const Json& resource);
  std::vector<RecordView> readRecords(const Identity& caller, const std::string& patientId);

  TxOutcome setPermission(const Identity& caller, const std::string& patientId, const std::string& provider,
                          const std::string& action);
  TxOutcome requestPrescription(const Identity& caller, const std::string& patientId,
                                const std::string& medicationCode);
  WriteResult fulfillPrescription(const Identity& caller, const std::string& patientId, std::uint64_t requestId,
                                  const Json& resource);
  Json listPrescriptions(const Identity& caller, const std::string& patientId);
  Json providers(const Identity& caller, const std::string& patientId);

  std::pair<std::string, pubsub::Subscription> subscribe(const Identity& caller, const Json& filter);
  void unsubscribe(const Identity& caller, const std::string& subscriptionId);
  std::vector<pubsub::Notification> notifications(const Identity& caller, std::int64_t afterSeq,
                                                  std::chrono::milliseconds wait);

  /// Mines one block. Throws ApiError(409) on an empty mempool.
  ledger::Block mine(const Identity& caller, std::optional<std::size_t> maxTxs);

  /// Registry lookup without a transaction.
  std::optional<Address> accountOf(const std::string& patientId);
  /// Registry lookup, creating the account with a transaction from caller if absent.
  Address ensureAccount(const Identity& caller, const std::string& patientId, bool* created = nullptr);

 private:
  void requireRole(const Identity& caller, Role role) const;
  void requirePatientSelf(const Identity& caller, const std::string& patientId) const;
  Address resolveProvider(const std::string& provider) const;
  std::string accessorOf(const Identity& caller) const;

  /// Submits all, then mines until every one is committed.
  std::vector<ledger::Receipt> runBatch(const std::vector<std::pair<Address, ledger::Payload>>& txs);
  ledger::Receipt runOne(const Address& sender, ledger::Payload payload);
  TxOutcome submitAuto(const Address& sender, ledger::Payload payload);
  Json staticCall(const Identity& caller, const Address& target, const std::string& function, const Json& args);
  WriteResult putAndAppend(const Identity& caller, const Address& account, const records::Resource& resource,
                           const std::function<ledger::Payload(const records::PutResult&)>& makeCall);
  void catchUpDispatcher();

  ServiceConfig config_;
  runtime::ContractTypeRegistry types_;
  std::shared_ptr<Clock> clock_;
  std::unique_ptr<ledger::Blockchain> chain_;
  std::unique_ptr<records::RecordStore> records_;
  std::unique_ptr<pubsub::Dispatcher> dispatcher_;
  std::unique_ptr<IdentityStore> identities_;
  contracts::SystemContracts system_;
  std::recursive_mutex flowMu_;
};

}  // namespace dash::service
