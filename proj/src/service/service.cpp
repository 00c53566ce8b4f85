#include "dash/service/service.hpp"

#include <iostream>

#include "dash/contracts/clients.hpp"
#include "dash/json_util.hpp"

namespace dash::service {

namespace fs = std::filesystem;
using contracts::PatientAccountClient;
using contracts::PlanStoreClient;
using contracts::RegistryClient;
using ledger::Receipt;

ApiError::ApiError(int status, std::string code, std::string reason, std::string revertReason,
                   std::optional<Digest> txId)
    : std::runtime_error(code + (reason.empty() ? "" : ": " + reason)),
      status_(status),
      code_(std::move(code)),
      reason_(std::move(reason)),
      revertReason_(std::move(revertReason)),
      txId_(txId) {}

Json ApiError::toJson() const {
  Json j{{"error", code_}, {"reason", reason_}};
  j["revertReason"] = revertReason_.empty() ? Json(nullptr) : Json(revertReason_);
  j["txId"] = txId_ ? Json(txId_->hex()) : Json(nullptr);
  return j;
}

namespace {

int statusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unauthorized: return 403;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownSubscription:
    case ErrorCode::UnknownSubscriber: return 404;
    case ErrorCode::SchemaViolation:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidFilter:
    case ErrorCode::MalformedTransaction: return 400;
    case ErrorCode::DuplicatePatient:
    case ErrorCode::DuplicateLabel:
    case ErrorCode::EmptyMempool: return 409;
    case ErrorCode::BackendUnavailable: return 503;
    case ErrorCode::IntegrityMismatch: return 502;
    default: return 500;
  }
}

// Revert reasons are "<Name>" or "<Name>: detail".
int statusForRevert(const std::string& reason) {
  auto name = reason.substr(0, reason.find(':'));
  if (name == "Unauthorized") return 403;
  if (name == "UnknownRequest" || name == "UnknownPlan" || name == "UnknownUserType") return 404;
  if (name == "AlreadyFulfilled" || name == "DuplicateProvider") return 409;
  if (name == "InvalidArgument" || name == "InvalidDescriptor" || name == "NotAProvider" ||
      name == "EmptyPatientId")
    return 400;
  return 422;
}

}  // namespace

ApiError ApiError::fromError(const Error& e) {
  return ApiError(statusFor(e.code()), std::string(toString(e.code())), e.detail());
}

ApiError ApiError::fromReceipt(const Receipt& r) {
  auto name = r.revertReason.substr(0, r.revertReason.find(':'));
  return ApiError(statusForRevert(r.revertReason), name, "transaction reverted", r.revertReason, r.txId);
}

DashService::DashService(ServiceConfig config) : config_(std::move(config)), clock_(config_.clock.make()) {
  contracts::registerDashContracts(types_);
  std::optional<fs::path> dataDir;
  if (!config_.dataDir.empty()) {
    dataDir = fs::path(config_.dataDir);
    fs::create_directories(*dataDir);
  }

  if (dataDir && fs::exists(*dataDir / "chain" / "genesis.json")) {
    chain_ = ledger::Blockchain::open(*dataDir / "chain", types_, clock_);
  } else {
    std::optional<fs::path> chainDir;
    if (dataDir) chainDir = *dataDir / "chain";
    chain_ = std::make_unique<ledger::Blockchain>(config_.chain, types_, clock_, chainDir);
    chain_->initGenesis([](ledger::Blockchain& c) { return contracts::bootstrapGenesis(c); });
  }
  system_ = contracts::SystemContracts::fromJson(chain_->config().systemContracts);

  std::optional<fs::path> auditFile;
  if (dataDir) auditFile = *dataDir / "audit.jsonl";
  auto audit = std::make_shared<records::AuditLog>(clock_, auditFile);
  std::unique_ptr<records::Backend> backend;
  if (dataDir && config_.recordBackend == "file")
    backend = std::make_unique<records::FileBackend>(*dataDir / "records");
  else
    backend = std::make_unique<records::MemoryBackend>();
  records_ = std::make_unique<records::RecordStore>(std::move(backend), audit);

  pubsub::DispatcherOptions opts;
  opts.dedupPerSubscriber = config_.dedupNotifications;
  if (dataDir) opts.dir = *dataDir / "pubsub";
  dispatcher_ = std::make_unique<pubsub::Dispatcher>(opts);
  catchUpDispatcher();
  chain_->onCommit([this](const ledger::Block& block, const std::vector<Receipt>& receipts) {
    try {
      if (dispatcher_->cursor() + 1 < static_cast<std::int64_t>(block.header.height)) catchUpDispatcher();
      dispatcher_->dispatchBlock(block.header.height, receipts);
    } catch (const std::exception& e) {
      // The block is committed regardless; the next commit or restart retries.
      std::cerr << "dispatch of block " << block.header.height << " failed: " << e.what() << "\n";
    }
  });

  std::optional<fs::path> idFile;
  if (dataDir) idFile = *dataDir / "identities.jsonl";
  identities_ = std::make_unique<IdentityStore>(idFile);
  if (!identities_->byLabel(chain_->config().adminLabel)) {
    Identity admin;
    admin.apiKey = config_.adminKey;
    admin.role = Role::Admin;
    admin.eoaLabel = chain_->config().adminLabel;
    admin.address = chain_->admin();
    admin.displayName = "Administrator";
    identities_->add(admin);
  }
}

DashService::~DashService() = default;

void DashService::catchUpDispatcher() {
  auto length = static_cast<std::int64_t>(chain_->length());
  for (auto h = dispatcher_->cursor() + 1; h < length; ++h) {
    auto height = static_cast<std::uint64_t>(h);
    auto receipts = chain_->blockReceipts(height);
    dispatcher_->dispatchBlock(height, receipts);
  }
}

Identity DashService::authenticate(const std::string& apiKey) const {
  auto id = identities_->byKey(apiKey);
  if (!id) throw ApiError(401, "Unauthenticated", "unknown or missing API key");
  return *id;
}

Identity DashService::adminIdentity() const {
  auto id = identities_->byLabel(chain_->config().adminLabel);
  if (!id) throw ApiError(500, "Internal", "admin identity missing");
  return *id;
}

void DashService::requireRole(const Identity& caller, Role role) const {
  if (caller.role != role)
    throw ApiError(403, "Unauthorized", "requires role " + std::string(toString(role)));
}

void DashService::requirePatientSelf(const Identity& caller, const std::string& patientId) const {
  if (caller.role != Role::Patient || caller.patientId != patientId)
    throw ApiError(403, "Unauthorized", "only the patient may do this");
}

std::string DashService::accessorOf(const Identity& caller) const { return caller.eoaLabel; }

Address DashService::resolveProvider(const std::string& provider) const {
  if (provider.starts_with("0x")) {
    Address a;
    if (!Address::tryFromHex(provider, a)) throw ApiError(400, "InvalidArgument", "malformed provider address");
    return a;
  }
  auto id = identities_->byProvider(provider);
  if (!id) throw ApiError(404, "NotFound", "unknown provider '" + provider + "'");
  return id->address;
}

std::vector<Receipt> DashService::runBatch(const std::vector<std::pair<Address, ledger::Payload>>& txs) {
  std::vector<Digest> ids;
  ids.reserve(txs.size());
  for (const auto& [sender, payload] : txs) ids.push_back(chain_->submit(sender, payload));
  std::vector<Receipt> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(chain_->settle(id));
  return out;
}

Receipt DashService::runOne(const Address& sender, ledger::Payload payload) {
  return runBatch({{sender, std::move(payload)}}).front();
}

TxOutcome DashService::submitAuto(const Address& sender, ledger::Payload payload) {
  TxOutcome out;
  out.txId = chain_->submit(sender, std::move(payload));
  auto threshold = config_.autoMineThreshold;
  if (threshold > 0 && chain_->mempool().size() >= threshold) out.receipt = chain_->settle(out.txId);
  return out;
}

Json DashService::staticCall(const Identity& caller, const Address& target, const std::string& function,
                             const Json& args) {
  auto r = chain_->staticCall(caller.address, target, function, args);
  if (!r.ok) throw ApiError(statusForRevert(r.reason), r.reason.substr(0, r.reason.find(':')), "call rejected", r.reason);
  return r.value;
}

std::optional<Address> DashService::accountOf(const std::string& patientId) {
  auto r = chain_->staticCall(chain_->admin(), system_.registry, "get", Json{{"patientId", patientId}});
  if (!r.ok || r.value.is_null()) return std::nullopt;
  return Address::fromHex(r.value.get<std::string>());
}

Address DashService::ensureAccount(const Identity& caller, const std::string& patientId, bool* created) {
  if (patientId.empty()) throw ApiError(400, "InvalidArgument", "empty patient id");
  if (created) *created = false;
  if (auto existing = accountOf(patientId)) return *existing;
  auto receipt = runOne(caller.address, RegistryClient{system_.registry}.lookupOrCreate(patientId));
  if (!receipt.ok()) throw ApiError::fromReceipt(receipt);
  if (created) *created = true;
  return Address::fromHex(receipt.returnValue->get<std::string>());
}

namespace {

// Fills the subject and authoring time when the client leaves them out.
records::Resource parseForPatient(const Json& body, const std::string& patientId, Clock& clock) {
  Json j = body;
  if (j.is_object() && !j.contains("subjectPatientId")) j["subjectPatientId"] = patientId;
  if (j.is_object() && !j.contains("authoredAt")) j["authoredAt"] = clock.now();
  auto r = records::Resource::fromJson(j);
  if (r.subjectPatientId != patientId)
    throw ApiError(400, "SchemaViolation", "resource subjectPatientId does not match the patient");
  return r;
}

}  // namespace

OnboardResult DashService::onboardPatient(const Identity& caller, const OnboardRequest& req) {
  std::lock_guard lock(flowMu_);
  requireRole(caller, Role::Admin);
  if (req.patientId.empty()) throw ApiError(400, "InvalidArgument", "empty patient id");
  auto label = contracts::patientLabel(req.patientId);
  if (identities_->byLabel(label)) throw ApiError(409, "DuplicatePatient", req.patientId);

  // Everything that can be rejected up front is checked before any side effect.
  records::Resource demographics = parseForPatient(req.demographics, req.patientId, *clock_);
  if (demographics.resourceType != records::ResourceType::Patient)
    throw ApiError(400, "SchemaViolation", "demographics must be a Patient resource");
  Json descriptor;
  try {
    descriptor = contracts::canonicalPlanDescriptor(req.plan);
  } catch (const runtime::Revert& r) {
    throw ApiError(400, "SchemaViolation", "invalid plan descriptor", r.reason);
  }
  if (!req.extrinsic.is_object() || !req.extrinsic.contains("memberNumber") || !req.extrinsic.contains("groupCode") ||
      !req.extrinsic.at("memberNumber").is_string() || !req.extrinsic.at("groupCode").is_string())
    throw ApiError(400, "SchemaViolation", "extrinsic requires string memberNumber and groupCode");

  OnboardResult result;
  auto eoa = chain_->eoaByLabel(label);
  Address owner = eoa ? *eoa : chain_->createEOA(label);
  const Address admin = chain_->admin();

  std::vector<std::pair<Address, ledger::Payload>> first{
      {admin, RegistryClient{system_.registry}.lookupOrCreate(req.patientId)}};
  if (config_.flyweightPlans) first.emplace_back(admin, PlanStoreClient{system_.planStore}.intern(descriptor));
  auto receipts = runBatch(first);
  result.receipts.emplace_back("lookupOrCreate", receipts[0]);
  if (!receipts[0].ok()) throw ApiError::fromReceipt(receipts[0]);
  result.account = Address::fromHex(receipts[0].returnValue->get<std::string>());
  if (config_.flyweightPlans) {
    result.receipts.emplace_back("intern", receipts[1]);
    if (!receipts[1].ok()) throw ApiError::fromReceipt(receipts[1]);
    result.planRef = Digest::fromHex(receipts[1].returnValue->get<std::string>());
  }

  auto put = records_->put(demographics);
  PatientAccountClient account{result.account};
  std::vector<std::pair<Address, ledger::Payload>> second;
  if (config_.flyweightPlans)
    second.emplace_back(owner, account.setInsurancePlan(*result.planRef, req.extrinsic));
  else
    second.emplace_back(owner, account.setInsurancePlanInline(descriptor, req.extrinsic));
  second.emplace_back(owner, account.appendRecord(put.recordHash, put.pointer.str(), "Patient"));
  receipts = runBatch(second);
  result.receipts.emplace_back("setInsurancePlan", receipts[0]);
  result.receipts.emplace_back("appendRecord", receipts[1]);
  if (!receipts[1].ok() && put.created) records_->remove(put.pointer);
  for (const auto& r : receipts)
    if (!r.ok()) throw ApiError::fromReceipt(r);

  Identity id;
  id.apiKey = deriveApiKey(config_.adminKey, label);
  id.role = Role::Patient;
  id.eoaLabel = label;
  id.address = owner;
  id.patientId = req.patientId;
  id.displayName = demographics.attributes.contains("name")
                       ? std::get<std::string>(demographics.attributes.at("name"))
                       : req.patientId;
  identities_->add(id);
  result.identity = id;
  return result;
}

Identity DashService::onboardProvider(const Identity& caller, const std::string& providerId, const std::string& name) {
  std::lock_guard lock(flowMu_);
  requireRole(caller, Role::Admin);
  if (providerId.empty()) throw ApiError(400, "InvalidArgument", "empty provider id");
  auto label = contracts::providerLabel(providerId);
  if (identities_->byLabel(label)) throw ApiError(409, "DuplicateLabel", label);
  auto eoa = chain_->eoaByLabel(label);
  Address owner = eoa ? *eoa : chain_->createEOA(label);
  auto receipt = runOne(chain_->admin(), contracts::FactoryClient{system_.factory}.create(
                                             contracts::kProviderUser, Json{{"owner", owner.hex()}, {"name", name}}));
  if (!receipt.ok()) throw ApiError::fromReceipt(receipt);

  Identity id;
  id.apiKey = deriveApiKey(config_.adminKey, label);
  id.role = Role::Provider;
  id.eoaLabel = label;
  id.address = owner;
  id.providerId = providerId;
  id.displayName = name.empty() ? providerId : name;
  id.providerAccount = Address::fromHex(receipt.returnValue->get<std::string>());
  identities_->add(id);
  dispatcher_->registerSubscriber(label);
  return id;
}


WriteResult DashService::putAndAppend(const Identity& caller, const Address& account,
                                      const records::Resource& resource,
                                      const std::function<ledger::Payload(const records::PutResult&)>& makeCall) {
  auto put = records_->put(resource);
  auto receipt = runOne(caller.address, makeCall(put));
  if (!receipt.ok()) {
    // Objects this write introduced must not outlive the rejected transaction.
    if (put.created) records_->remove(put.pointer);
    throw ApiError::fromReceipt(receipt);
  }
  WriteResult out;
  out.receipt = receipt;
  out.entryIndex = receipt.returnValue->get<std::uint64_t>();
  out.recordHash = put.recordHash;
  out.pointer = put.pointer;
  out.account = account;
  return out;
}

WriteResult DashService::writeRecord(const Identity& caller, const std::string& patientId, const Json& body) {
  std::lock_guard lock(flowMu_);
  if (caller.role == Role::Patient)
    requirePatientSelf(caller, patientId);
  else
    requireRole(caller, Role::Provider);
  auto resource = parseForPatient(body, patientId, *clock_);
  auto account = ensureAccount(caller, patientId);
  auto type = std::string(records::toString(resource.resourceType));
  return putAndAppend(caller, account, resource, [&](const records::PutResult& put) -> ledger::Payload {
    return PatientAccountClient{account}.appendRecord(put.recordHash, put.pointer.str(), type);
  });
}

std::vector<RecordView> DashService::readRecords(const Identity& caller, const std::string& patientId) {
  Address account;
  {
    std::lock_guard lock(flowMu_);
    if (caller.role == Role::Patient) {
      requirePatientSelf(caller, patientId);
    } else {
      requireRole(caller, Role::Provider);
    }
    bool created = false;
    account = ensureAccount(caller, patientId, &created);
    // A just-created account has no entries and no grants yet.
    if (created) return {};
  }
  Json entries = staticCall(caller, account, "listRecords", Json::object());
  std::vector<RecordView> out;
  std::uint64_t index = 0;
  for (const auto& entry : entries) {
    auto pointer = records::StoragePointer::parse(json::str(entry, "pointer"));
    auto proxy = records_->makeProxy(pointer, json::digest(entry, "recordHash"));
    RecordView view;
    view.entryIndex = index++;
    view.entry = entry;
    view.resource = records_->resolve(proxy, accessorOf(caller));
    out.push_back(std::move(view));
  }
  return out;
}

TxOutcome DashService::setPermission(const Identity& caller, const std::string& patientId,
                                     const std::string& provider, const std::string& action) {
  std::lock_guard lock(flowMu_);
  requirePatientSelf(caller, patientId);
  if (action != "grant" && action != "revoke")
    throw ApiError(400, "InvalidArgument", "action must be 'grant' or 'revoke'");
  auto account = accountOf(patientId);
  if (!account) throw ApiError(404, "NotFound", "no account for patient " + patientId);
  auto providerAddr = resolveProvider(provider);
  PatientAccountClient client{*account};
  auto out = submitAuto(caller.address,
                        action == "grant" ? client.grantAccess(providerAddr) : client.revokeAccess(providerAddr));
  if (out.receipt && !out.receipt->ok()) throw ApiError::fromReceipt(*out.receipt);
  return out;
}

TxOutcome DashService::requestPrescription(const Identity& caller, const std::string& patientId,
                                           const std::string& medicationCode) {
  std::lock_guard lock(flowMu_);
  requirePatientSelf(caller, patientId);
  if (medicationCode.empty()) throw ApiError(400, "InvalidArgument", "empty medicationCode");
  auto account = accountOf(patientId);
  if (!account) throw ApiError(404, "NotFound", "no account for patient " + patientId);
  auto out = submitAuto(caller.address, PatientAccountClient{*account}.requestPrescription(medicationCode));
  if (out.receipt && !out.receipt->ok()) throw ApiError::fromReceipt(*out.receipt);
  return out;
}

WriteResult DashService::fulfillPrescription(const Identity& caller, const std::string& patientId,
                                             std::uint64_t requestId, const Json& body) {
  std::lock_guard lock(flowMu_);
  requireRole(caller, Role::Provider);
  auto resource = parseForPatient(body, patientId, *clock_);
  if (resource.resourceType != records::ResourceType::MedicationRequest)
    throw ApiError(400, "SchemaViolation", "fulfillment must be a MedicationRequest resource");
  auto account = accountOf(patientId);
  if (!account) throw ApiError(404, "NotFound", "no account for patient " + patientId);
  return putAndAppend(caller, *account, resource, [&](const records::PutResult& put) -> ledger::Payload {
    return PatientAccountClient{*account}.fulfillPrescription(requestId, put.recordHash, put.pointer.str());
  });
}

Json DashService::listPrescriptions(const Identity& caller, const std::string& patientId) {
  auto account = accountOf(patientId);
  if (!account) throw ApiError(404, "NotFound", "no account for patient " + patientId);
  return staticCall(caller, *account, "listPrescriptions", Json::object());
}

Json DashService::providers(const Identity& caller, const std::string& patientId) {
  auto account = accountOf(patientId);
  if (!account) throw ApiError(404, "NotFound", "no account for patient " + patientId);
  return staticCall(caller, *account, "getProviders", Json::object());
}

std::pair<std::string, pubsub::Subscription> DashService::subscribe(const Identity& caller, const Json& body) {
  std::lock_guard lock(flowMu_);
  requireRole(caller, Role::Provider);
  if (!body.is_object()) throw ApiError(400, "InvalidFilter", "filter must be an object");
  Json filterJson = body;
  if (auto it = filterJson.find("patientId"); it != filterJson.end()) {
    if (!it->is_string()) throw ApiError(400, "InvalidFilter", "patientId must be a string");
    auto account = accountOf(it->get<std::string>());
    if (!account) throw ApiError(404, "NotFound", "no account for patient " + it->get<std::string>());
    if (filterJson.contains("account")) throw ApiError(400, "InvalidFilter", "give patientId or account, not both");
    filterJson.erase("patientId");
    filterJson["account"] = account->hex();
  }
  auto filter = pubsub::Filter::fromJson(filterJson);
  auto tip = chain_->length() - 1;
  auto id = dispatcher_->subscribe(caller.eoaLabel, filter, tip);
  return {id, *dispatcher_->subscription(id)};
}

void DashService::unsubscribe(const Identity& caller, const std::string& subscriptionId) {
  std::lock_guard lock(flowMu_);
  requireRole(caller, Role::Provider);
  auto sub = dispatcher_->subscription(subscriptionId);
  if (!sub) throw ApiError(404, "UnknownSubscription", subscriptionId);
  if (sub->subscriberId != caller.eoaLabel) throw ApiError(403, "Unauthorized", "not your subscription");
  dispatcher_->unsubscribe(subscriptionId, chain_->length() - 1);
}

std::vector<pubsub::Notification> DashService::notifications(const Identity& caller, std::int64_t afterSeq,
                                                             std::chrono::milliseconds wait) {
  requireRole(caller, Role::Provider);
  if (!dispatcher_->knownSubscriber(caller.eoaLabel)) dispatcher_->registerSubscriber(caller.eoaLabel);
  if (wait.count() > 0) return dispatcher_->pollWait(caller.eoaLabel, afterSeq, wait);
  return dispatcher_->poll(caller.eoaLabel, afterSeq);
}

ledger::Block DashService::mine(const Identity& caller, std::optional<std::size_t> maxTxs) {
  std::lock_guard lock(flowMu_);
  requireRole(caller, Role::Admin);
  return chain_->mineBlock(maxTxs);
}

}  // namespace dash::service
