#include "dash/contracts/dash_contracts.hpp"

#include <algorithm>

#include "dash/error.hpp"
#include "dash/ledger/blockchain.hpp"
#include "dash/runtime/world_state.hpp"

namespace dash::contracts {

using runtime::CallContext;
using runtime::ContractType;
using runtime::ContractTypeId;
using runtime::Revert;

namespace {

const Json& argField(const Json& args, const char* key) {
  if (!args.is_object()) throw Revert("InvalidArgument: arguments must be an object");
  auto it = args.find(key);
  if (it == args.end()) throw Revert(std::string("InvalidArgument: missing ") + key);
  return *it;
}

std::string strArg(const Json& args, const char* key) {
  const auto& v = argField(args, key);
  if (!v.is_string()) throw Revert(std::string("InvalidArgument: ") + key + " must be a string");
  return v.get<std::string>();
}

std::uint64_t u64Arg(const Json& args, const char* key) {
  const auto& v = argField(args, key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw Revert(std::string("InvalidArgument: ") + key + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

Address addrArg(const Json& args, const char* key) {
  Address a;
  if (!Address::tryFromHex(strArg(args, key), a)) throw Revert(std::string("InvalidArgument: ") + key + " is not an address");
  return a;
}

Digest digestArg(const Json& args, const char* key) {
  Digest d;
  if (!Digest::tryFromHex(strArg(args, key), d)) throw Revert(std::string("InvalidArgument: ") + key + " is not a digest");
  return d;
}

Address loadAddress(CallContext& ctx, const char* key) {
  auto v = ctx.load(key);
  Address a;
  if (!v || !v->is_string() || !Address::tryFromHex(v->get<std::string>(), a)) throw Revert(std::string("NotConfigured: ") + key);
  return a;
}

std::uint64_t loadCount(CallContext& ctx, const char* key) { return ctx.loadOr(key, 0).get<std::uint64_t>(); }

std::string trim(std::string s) {
  auto isSpace = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (!s.empty() && isSpace(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && isSpace(s[i])) ++i;
  return s.substr(i);
}

bool isProvider(CallContext& ctx, const Address& factory, const Address& who) {
  return ctx.call(factory, "isProvider", Json{{"address", who.hex()}}).get<bool>();
}

// ---------------------------------------------------------------- factory

ContractType makeFactory() {
  ContractType t;
  t.id = {kFactoryType, 1};
  t.constructor = [](CallContext& ctx, const Json& args) -> Json {
    ctx.store("admin", addrArg(args, "admin").hex());
    const auto& versions = argField(args, "versions");
    if (!versions.is_object()) throw Revert("InvalidArgument: versions must be an object");
    for (const auto& [userType, v] : versions.items()) {
      auto typeId = strArg(v, "typeId");
      auto version = u64Arg(v, "version");
      if (!ctx.isRegistered(typeId, static_cast<std::uint32_t>(version))) throw Revert("UnknownContractType");
      ctx.store("active/" + userType, Json{{"typeId", typeId}, {"version", version}});
    }
    return nullptr;
  };

  t.functions["configure"] = [](CallContext& ctx, const Json& args) -> Json {
    ctx.require(ctx.caller() == loadAddress(ctx, "admin"), "Unauthorized");
    ctx.require(!ctx.load("registry"), "AlreadyConfigured");
    ctx.store("registry", addrArg(args, "registry").hex());
    ctx.store("planStore", addrArg(args, "planStore").hex());
    return nullptr;
  };

  t.functions["create"] = [](CallContext& ctx, const Json& args) -> Json {
    auto userType = strArg(args, "userType");
    auto active = ctx.load("active/" + userType);
    if (!active) throw Revert("UnknownUserType");
    if (userType == kPatientUser) {
      ctx.require(ctx.caller() == loadAddress(ctx, "registry"), "Unauthorized");
    } else {
      ctx.require(ctx.caller() == loadAddress(ctx, "admin"), "Unauthorized");
    }
    Json params = args.contains("params") ? args.at("params") : Json::object();
    if (!params.is_object()) throw Revert("InvalidArgument: params must be an object");
    params["factory"] = ctx.self().hex();
    if (auto planStore = ctx.load("planStore")) params["planStore"] = *planStore;

    Address owner;
    if (userType == kProviderUser) {
      owner = addrArg(params, "owner");
      ctx.require(!ctx.load("providerOf/" + owner.hex()), "DuplicateProvider");
    }
    auto addr = ctx.create(active->at("typeId").get<std::string>(), active->at("version").get<std::uint32_t>(), params);
    ctx.store("created/" + addr.hex(), userType);
    if (userType == kProviderUser) ctx.store("providerOf/" + owner.hex(), addr.hex());
    return addr.hex();
  };

  t.functions["setActiveVersion"] = [](CallContext& ctx, const Json& args) -> Json {
    ctx.require(ctx.caller() == loadAddress(ctx, "admin"), "Unauthorized");
    auto userType = strArg(args, "userType");
    auto typeId = strArg(args, "typeId");
    auto version = u64Arg(args, "version");
    if (userType.empty()) throw Revert("InvalidArgument: empty userType");
    if (version > UINT32_MAX || !ctx.isRegistered(typeId, static_cast<std::uint32_t>(version)))
      throw Revert("UnknownContractType");
    ctx.store("active/" + userType, Json{{"typeId", typeId}, {"version", version}});
    ctx.emit(topic::kFactoryVersionChanged, Json{{"userType", userType}, {"typeId", typeId}, {"version", version}});
    return nullptr;
  };

  t.functions["activeVersion"] = [](CallContext& ctx, const Json& args) -> Json {
    return ctx.loadOr("active/" + strArg(args, "userType"), nullptr);
  };

  t.functions["isProvider"] = [](CallContext& ctx, const Json& args) -> Json {
    return ctx.load("providerOf/" + addrArg(args, "address").hex()).has_value();
  };

  t.functions["providerAccountOf"] = [](CallContext& ctx, const Json& args) -> Json {
    return ctx.loadOr("providerOf/" + addrArg(args, "address").hex(), nullptr);
  };

  t.functions["accountType"] = [](CallContext& ctx, const Json& args) -> Json {
    return ctx.loadOr("created/" + addrArg(args, "address").hex(), nullptr);
  };
  return t;
}

// --------------------------------------------------------------- registry

ContractType makeRegistry() {
  ContractType t;
  t.id = {kRegistryType, 1};
  t.constructor = [](CallContext& ctx, const Json& args) -> Json {
    ctx.store("factory", addrArg(args, "factory").hex());
    ctx.store("admin", addrArg(args, "admin").hex());
    return nullptr;
  };

  t.functions["lookupOrCreate"] = [](CallContext& ctx, const Json& args) -> Json {
    auto patientId = strArg(args, "patientId");
    if (patientId.empty()) throw Revert("EmptyPatientId");
    auto factory = loadAddress(ctx, "factory");
    ctx.require(ctx.caller() == loadAddress(ctx, "admin") || isProvider(ctx, factory, ctx.caller()), "Unauthorized");

    if (auto existing = ctx.load("entry/" + patientId)) return *existing;

    auto owner = runtime::eoaAddress(patientLabel(patientId));
    auto created = ctx.call(factory, "create",
                            Json{{"userType", kPatientUser}, {"params", {{"patientId", patientId}, {"owner", owner.hex()}}}});
    ctx.store("entry/" + patientId, created);
    ctx.store("count", loadCount(ctx, "count") + 1);
    ctx.emit(topic::kPatientAccountCreated, Json{{"patientId", patientId}, {"address", created}});
    return created;
  };

  t.functions["get"] = [](CallContext& ctx, const Json& args) -> Json {
    return ctx.loadOr("entry/" + strArg(args, "patientId"), nullptr);
  };

  t.functions["count"] = [](CallContext& ctx, const Json&) -> Json { return loadCount(ctx, "count"); };
  return t;
}

// ------------------------------------------------------------- plan store

std::string planKey(const Digest& ref) { return "plan/" + ref.hex(); }
std::string refCountKey(const Digest& ref) { return "refCount/" + ref.hex(); }

void requirePatientAccountCaller(CallContext& ctx) {
  auto factory = loadAddress(ctx, "factory");
  auto type = ctx.call(factory, "accountType", Json{{"address", ctx.caller().hex()}});
  ctx.require(type.is_string() && type.get<std::string>() == kPatientUser, "Unauthorized");
}

ContractType makePlanStore() {
  ContractType t;
  t.id = {kPlanStoreType, 1};
  t.constructor = [](CallContext& ctx, const Json& args) -> Json {
    ctx.store("factory", addrArg(args, "factory").hex());
    return nullptr;
  };

  t.functions["intern"] = [](CallContext& ctx, const Json& args) -> Json {
    auto descriptor = canonicalPlanDescriptor(argField(args, "descriptor"));
    auto ref = planRefOf(descriptor);
    if (!ctx.load(planKey(ref))) {
      ctx.store(planKey(ref), descriptor);
      ctx.store(refCountKey(ref), 0);
      ctx.store("count", loadCount(ctx, "count") + 1);
      ctx.emit(topic::kPlanInterned, Json{{"planRef", ref.hex()}});
    }
    return ref.hex();
  };

  t.functions["acquire"] = [](CallContext& ctx, const Json& args) -> Json {
    auto ref = digestArg(args, "planRef");
    requirePatientAccountCaller(ctx);
    auto count = ctx.load(refCountKey(ref));
    if (!count) throw Revert("UnknownPlan");
    ctx.store(refCountKey(ref), count->get<std::uint64_t>() + 1);
    return nullptr;
  };

  t.functions["release"] = [](CallContext& ctx, const Json& args) -> Json {
    auto ref = digestArg(args, "planRef");
    requirePatientAccountCaller(ctx);
    auto count = ctx.load(refCountKey(ref));
    if (!count) throw Revert("UnknownPlan");
    auto n = count->get<std::uint64_t>();
    ctx.require(n > 0, "RefCountUnderflow");
    ctx.store(refCountKey(ref), n - 1);
    return nullptr;
  };

  t.functions["get"] = [](CallContext& ctx, const Json& args) -> Json {
    auto ref = digestArg(args, "planRef");
    auto descriptor = ctx.load(planKey(ref));
    if (!descriptor) return nullptr;
    return Json{{"descriptor", *descriptor}, {"refCount", ctx.loadOr(refCountKey(ref), 0)}};
  };

  t.functions["count"] = [](CallContext& ctx, const Json&) -> Json { return loadCount(ctx, "count"); };
  return t;
}

// -------------------------------------------------------- provider account

ContractType makeProviderAccount() {
  ContractType t;
  t.id = {kProviderAccountType, 1};
  t.constructor = [](CallContext& ctx, const Json& args) -> Json {
    auto name = strArg(args, "name");
    if (name.empty()) throw Revert("InvalidArgument: empty name");
    ctx.store("name", name);
    ctx.store("owner", addrArg(args, "owner").hex());
    ctx.store("factory", addrArg(args, "factory").hex());
    return nullptr;
  };
  t.functions["info"] = [](CallContext& ctx, const Json&) -> Json {
    return Json{{"name", ctx.loadOr("name", "")}, {"owner", ctx.loadOr("owner", "")}};
  };
  return t;
}

// --------------------------------------------------------- patient account

struct PatientView {
  CallContext& ctx;

  Address owner() { return loadAddress(ctx, "owner"); }
  std::string patientId() { return ctx.loadOr("patientId", "").get<std::string>(); }
  Json providers() { return ctx.loadOr("providers", Json::array()); }

  bool isOwner() { return ctx.caller() == owner(); }
  bool isGrantedProvider() {
    auto list = providers();
    auto me = ctx.caller().hex();
    return std::find(list.begin(), list.end(), Json(me)) != list.end();
  }
  bool mayAccess() { return isOwner() || isGrantedProvider(); }
};

std::uint64_t appendEntry(CallContext& ctx, std::uint32_t version, const Digest& recordHash, const std::string& pointer,
                          const std::string& resourceType) {
  auto index = loadCount(ctx, "records.length");
  Json entry{{"recordHash", recordHash.hex()},
             {"pointer", pointer},
             {"resourceType", resourceType},
             {"addedBy", ctx.caller().hex()},
             {"blockHeight", ctx.blockHeight()}};
  if (version >= 2) {
    // v2 links each entry to its predecessor so the record list is
    // self-verifying without replaying the chain.
    auto prev = ctx.loadOr("records.head", std::string(64, '0')).get<std::string>();
    auto head = sha256(prev + recordHash.hex()).hex();
    entry["chainHash"] = head;
    ctx.store("records.head", head);
  }
  ctx.store("record/" + std::to_string(index), std::move(entry));
  ctx.store("records.length", index + 1);
  ctx.emit(topic::kRecordAppended,
           Json{{"patientId", PatientView{ctx}.patientId()}, {"entryIndex", index}, {"resourceType", resourceType}});
  return index;
}

ContractType makePatientAccount(std::uint32_t version) {
  ContractType t;
  t.id = {kPatientAccountType, version};
  t.constructor = [](CallContext& ctx, const Json& args) -> Json {
    auto patientId = strArg(args, "patientId");
    if (patientId.empty()) throw Revert("EmptyPatientId");
    auto factory = addrArg(args, "factory");
    ctx.require(ctx.caller() == factory, "Unauthorized");
    ctx.store("patientId", patientId);
    ctx.store("owner", addrArg(args, "owner").hex());
    ctx.store("factory", factory.hex());
    ctx.store("planStore", addrArg(args, "planStore").hex());
    return nullptr;
  };

  auto checkProvider = [](CallContext& ctx, const Address& provider) {
    if (!isProvider(ctx, loadAddress(ctx, "factory"), provider)) throw Revert("NotAProvider");
  };

  t.functions["grantAccess"] = [checkProvider](CallContext& ctx, const Json& args) -> Json {
    PatientView p{ctx};
    ctx.require(p.isOwner(), "Unauthorized");
    auto provider = addrArg(args, "provider");
    checkProvider(ctx, provider);
    auto list = p.providers();
    if (std::find(list.begin(), list.end(), Json(provider.hex())) != list.end()) return nullptr;
    list.push_back(provider.hex());
    std::sort(list.begin(), list.end());
    ctx.store("providers", std::move(list));
    ctx.emit(topic::kAccessGranted, Json{{"patientId", p.patientId()}, {"provider", provider.hex()}});
    return nullptr;
  };

  t.functions["revokeAccess"] = [checkProvider](CallContext& ctx, const Json& args) -> Json {
    PatientView p{ctx};
    ctx.require(p.isOwner(), "Unauthorized");
    auto provider = addrArg(args, "provider");
    checkProvider(ctx, provider);
    auto list = p.providers();
    auto it = std::find(list.begin(), list.end(), Json(provider.hex()));
    if (it == list.end()) return nullptr;
    list.erase(it);
    ctx.store("providers", std::move(list));
    ctx.emit(topic::kAccessRevoked, Json{{"patientId", p.patientId()}, {"provider", provider.hex()}});
    return nullptr;
  };

  t.functions["appendRecord"] = [version](CallContext& ctx, const Json& args) -> Json {
    ctx.require(PatientView{ctx}.mayAccess(), "Unauthorized");
    auto resourceType = strArg(args, "resourceType");
    if (resourceType.empty()) throw Revert("InvalidArgument: empty resourceType");
    return appendEntry(ctx, version, digestArg(args, "recordHash"), strArg(args, "pointer"), resourceType);
  };

  t.functions["listRecords"] = [](CallContext& ctx, const Json&) -> Json {
    ctx.require(PatientView{ctx}.mayAccess(), "Unauthorized");
    Json out = Json::array();
    auto n = loadCount(ctx, "records.length");
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(*ctx.load("record/" + std::to_string(i)));
    return out;
  };

  t.functions["requestPrescription"] = [](CallContext& ctx, const Json& args) -> Json {
    PatientView p{ctx};
    ctx.require(p.isOwner(), "Unauthorized");
    auto code = strArg(args, "medicationCode");
    if (code.empty()) throw Revert("InvalidArgument: empty medicationCode");
    auto id = loadCount(ctx, "rx.length");
    ctx.store("rx/" + std::to_string(id),
              Json{{"medicationCode", code}, {"status", "Open"}, {"requestedAtHeight", ctx.blockHeight()}});
    ctx.store("rx.length", id + 1);
    ctx.emit(topic::kPrescriptionRequested, Json{{"patientId", p.patientId()}, {"requestId", id}, {"medicationCode", code}});
    return id;
  };

  t.functions["fulfillPrescription"] = [version](CallContext& ctx, const Json& args) -> Json {
    PatientView p{ctx};
    ctx.require(p.isGrantedProvider(), "Unauthorized");
    auto id = u64Arg(args, "requestId");
    auto key = "rx/" + std::to_string(id);
    auto request = ctx.load(key);
    if (!request) throw Revert("UnknownRequest");
    if (request->at("status") != "Open") throw Revert("AlreadyFulfilled");
    auto entryIndex = appendEntry(ctx, version, digestArg(args, "recordHash"), strArg(args, "pointer"), "MedicationRequest");
    (*request)["status"] = "Fulfilled";
    (*request)["fulfilledBy"] = ctx.caller().hex();
    (*request)["fulfilledAtHeight"] = ctx.blockHeight();
    (*request)["entryIndex"] = entryIndex;
    ctx.store(key, std::move(*request));
    ctx.emit(topic::kPrescriptionFulfilled,
             Json{{"patientId", p.patientId()}, {"requestId", id}, {"entryIndex", entryIndex}, {"provider", ctx.caller().hex()}});
    return entryIndex;
  };

  t.functions["listPrescriptions"] = [](CallContext& ctx, const Json&) -> Json {
    ctx.require(PatientView{ctx}.mayAccess(), "Unauthorized");
    Json out = Json::array();
    auto n = loadCount(ctx, "rx.length");
    for (std::uint64_t i = 0; i < n; ++i) {
      auto rx = *ctx.load("rx/" + std::to_string(i));
      rx["requestId"] = i;
      out.push_back(std::move(rx));
    }
    return out;
  };

  t.functions["setInsurancePlan"] = [](CallContext& ctx, const Json& args) -> Json {
    PatientView p{ctx};
    ctx.require(p.isOwner(), "Unauthorized");
    auto ref = digestArg(args, "planRef");
    const auto& extrinsic = argField(args, "extrinsic");
    Json ext{{"memberNumber", strArg(extrinsic, "memberNumber")}, {"groupCode", strArg(extrinsic, "groupCode")}};
    auto planStore = loadAddress(ctx, "planStore");
    auto current = ctx.load("planRef");
    if (!current || current->get<std::string>() != ref.hex()) {
      auto acquired = ctx.tryCall(planStore, "acquire", Json{{"planRef", ref.hex()}});
      if (!acquired.ok) throw Revert(acquired.reason);
      if (current) ctx.call(planStore, "release", Json{{"planRef", *current}});
      ctx.store("planRef", ref.hex());
    }
    ctx.store("planExtrinsic", std::move(ext));
    ctx.emit(topic::kInsurancePlanSet, Json{{"patientId", p.patientId()}, {"planRef", ref.hex()}});
    return nullptr;
  };

  // Baseline without interning: the full descriptor is copied into the account.
  t.functions["setInsurancePlanInline"] = [](CallContext& ctx, const Json& args) -> Json {
    PatientView p{ctx};
    ctx.require(p.isOwner(), "Unauthorized");
    auto descriptor = canonicalPlanDescriptor(argField(args, "descriptor"));
    const auto& extrinsic = argField(args, "extrinsic");
    ctx.store("planDescriptor", descriptor);
    ctx.store("planExtrinsic",
              Json{{"memberNumber", strArg(extrinsic, "memberNumber")}, {"groupCode", strArg(extrinsic, "groupCode")}});
    return nullptr;
  };

  t.functions["getInsurancePlan"] = [](CallContext& ctx, const Json&) -> Json {
    ctx.require(PatientView{ctx}.mayAccess(), "Unauthorized");
    Json out{{"planRef", ctx.loadOr("planRef", nullptr)}, {"extrinsic", ctx.loadOr("planExtrinsic", nullptr)}};
    if (auto inline_ = ctx.load("planDescriptor")) out["descriptor"] = *inline_;
    return out;
  };

  t.functions["getProviders"] = [](CallContext& ctx, const Json&) -> Json {
    PatientView p{ctx};
    ctx.require(p.mayAccess(), "Unauthorized");
    return p.providers();
  };

  t.functions["info"] = [version](CallContext& ctx, const Json&) -> Json {
    PatientView p{ctx};
    return Json{{"patientId", p.patientId()},
                {"owner", p.owner().hex()},
                {"version", version},
                {"recordCount", loadCount(ctx, "records.length")}};
  };

  if (version >= 2) {
    t.functions["recordCount"] = [](CallContext& ctx, const Json&) -> Json {
      return loadCount(ctx, "records.length");
    };
    t.functions["recordsHead"] = [](CallContext& ctx, const Json&) -> Json {
      ctx.require(PatientView{ctx}.mayAccess(), "Unauthorized");
      return ctx.loadOr("records.head", nullptr);
    };
  }
  return t;
}

}  // namespace

std::string patientLabel(std::string_view patientId) { return "patient:" + std::string(patientId); }
std::string providerLabel(std::string_view providerId) { return "provider:" + std::string(providerId); }

Json canonicalPlanDescriptor(const Json& descriptor) {
  if (!descriptor.is_object() || descriptor.size() != 3) throw Revert("InvalidDescriptor");
  Json out = Json::object();
  for (const char* key : {"payerName", "planCode", "coverageTier"}) {
    auto it = descriptor.find(key);
    if (it == descriptor.end() || !it->is_string()) throw Revert("InvalidDescriptor");
    auto value = trim(it->get<std::string>());
    if (value.empty()) throw Revert("InvalidDescriptor");
    out[key] = std::move(value);
  }
  return out;
}

Digest planRefOf(const Json& descriptor) { return hashCanonical(canonicalPlanDescriptor(descriptor)); }

void registerDashContracts(runtime::ContractTypeRegistry& registry) {
  registry.add(makeFactory());
  registry.add(makeRegistry());
  registry.add(makePlanStore());
  registry.add(makeProviderAccount());
  registry.add(makePatientAccount(1));
  registry.add(makePatientAccount(2));
}

Json SystemContracts::toJson() const {
  return Json{{"factory", factory.hex()}, {"planStore", planStore.hex()}, {"registry", registry.hex()}};
}

SystemContracts SystemContracts::fromJson(const Json& j) {
  auto get = [&](const char* key) {
    Address a;
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_string() || !Address::tryFromHex(j.at(key).get<std::string>(), a))
      fail(ErrorCode::InvalidArgument, std::string("system contract address missing: ") + key);
    return a;
  };
  return SystemContracts{get("factory"), get("planStore"), get("registry")};
}

Json bootstrapGenesis(ledger::Blockchain& chain) {
  const auto admin = chain.admin();
  const auto base = chain.account(admin)->nonce + chain.mempool().pendingFor(admin);
  SystemContracts sys{runtime::contractAddress(admin, base), runtime::contractAddress(admin, base + 1),
                      runtime::contractAddress(admin, base + 2)};

  chain.submit(admin, ledger::CreateContract{
                          kFactoryType, 1,
                          Json{{"admin", admin.hex()},
                               {"versions",
                                {{kPatientUser, {{"typeId", kPatientAccountType}, {"version", 1}}},
                                 {kProviderUser, {{"typeId", kProviderAccountType}, {"version", 1}}}}}}});
  chain.submit(admin, ledger::CreateContract{kPlanStoreType, 1, Json{{"factory", sys.factory.hex()}}});
  chain.submit(admin,
               ledger::CreateContract{kRegistryType, 1, Json{{"factory", sys.factory.hex()}, {"admin", admin.hex()}}});
  chain.submit(admin, ledger::CallContract{sys.factory, "configure",
                                           Json{{"registry", sys.registry.hex()}, {"planStore", sys.planStore.hex()}}});
  return sys.toJson();
}

std::vector<std::string> patientAccountInterface() {
  return {"grantAccess",         "revokeAccess",      "appendRecord",     "listRecords",
          "requestPrescription", "fulfillPrescription", "listPrescriptions", "setInsurancePlan",
          "setInsurancePlanInline", "getInsurancePlan", "getProviders",     "info"};
}

}  // namespace dash::contracts
