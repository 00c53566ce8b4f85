#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dash/bytes.hpp"
#include "dash/hash.hpp"
#include "dash/runtime/contract.hpp"

namespace dash::ledger {
class Blockchain;
}

namespace dash::contracts {

inline constexpr const char* kRegistryType = "PatientRegistry";
inline constexpr const char* kFactoryType = "AccountFactory";
inline constexpr const char* kPlanStoreType = "InsurancePlanStore";
inline constexpr const char* kPatientAccountType = "PatientAccount";
inline constexpr const char* kProviderAccountType = "ProviderAccount";

inline constexpr const char* kPatientUser = "Patient";
inline constexpr const char* kProviderUser = "Provider";

namespace topic {
inline constexpr const char* kPatientAccountCreated = "PatientAccountCreated";
inline constexpr const char* kAccessGranted = "AccessGranted";
inline constexpr const char* kAccessRevoked = "AccessRevoked";
inline constexpr const char* kRecordAppended = "RecordAppended";
inline constexpr const char* kPrescriptionRequested = "PrescriptionRequested";
inline constexpr const char* kPrescriptionFulfilled = "PrescriptionFulfilled";
inline constexpr const char* kFactoryVersionChanged = "FactoryVersionChanged";
inline constexpr const char* kPlanInterned = "PlanInterned";
inline constexpr const char* kInsurancePlanSet = "InsurancePlanSet";
}  // namespace topic

/// EOA label convention for a patient's own account. The registry derives a
/// new PatientAccount's owner from it, so accounts auto-created on a
/// provider's write path are already bound to the patient's future EOA.
std::string patientLabel(std::string_view patientId);
std::string providerLabel(std::string_view providerId);

/// Registers PatientRegistry, AccountFactory, InsurancePlanStore,
/// ProviderAccount v1 and PatientAccount v1 + v2.
void registerDashContracts(runtime::ContractTypeRegistry& registry);

/// Trims and key-sorts {payerName, planCode, coverageTier}. Throws
/// runtime::Revert("InvalidDescriptor") on missing, empty or extra fields.
Json canonicalPlanDescriptor(const Json& descriptor);
Digest planRefOf(const Json& descriptor);

struct SystemContracts {
  Address factory;
  Address planStore;
  Address registry;

  Json toJson() const;
  static SystemContracts fromJson(const Json& j);
};

/// Genesis setup: submits the singleton system contract instantiations from
/// the admin EOA and returns their (deterministic) addresses.
Json bootstrapGenesis(ledger::Blockchain& chain);

/// Function names the client wrappers rely on for PatientAccount.
std::vector<std::string> patientAccountInterface();

}  // namespace dash::contracts
