#pragma once

#include <cstdint>
#include <string>

#include "dash/contracts/dash_contracts.hpp"
#include "dash/ledger/transaction.hpp"

namespace dash::contracts {

// Thin payload builders. Client code addresses contracts only through
// these, so a new PatientAccount version must keep these signatures.

struct RegistryClient {
  Address address;
  ledger::CallContract lookupOrCreate(const std::string& patientId) const;
  ledger::CallContract get(const std::string& patientId) const;
};

struct FactoryClient {
  Address address;
  ledger::CallContract create(const std::string& userType, Json params) const;
  ledger::CallContract setActiveVersion(const std::string& userType, const std::string& typeId,
                                        std::uint32_t version) const;
  ledger::CallContract isProvider(const Address& eoa) const;
};

struct PlanStoreClient {
  Address address;
  ledger::CallContract intern(const Json& descriptor) const;
  ledger::CallContract get(const Digest& planRef) const;
};

struct PatientAccountClient {
  Address address;
  ledger::CallContract grantAccess(const Address& provider) const;
  ledger::CallContract revokeAccess(const Address& provider) const;
  ledger::CallContract appendRecord(const Digest& recordHash, const std::string& pointer,
                                    const std::string& resourceType) const;
  ledger::CallContract listRecords() const;
  ledger::CallContract requestPrescription(const std::string& medicationCode) const;
  ledger::CallContract fulfillPrescription(std::uint64_t requestId, const Digest& recordHash,
                                           const std::string& pointer) const;
  ledger::CallContract listPrescriptions() const;
  ledger::CallContract setInsurancePlan(const Digest& planRef, const Json& extrinsic) const;
  ledger::CallContract setInsurancePlanInline(const Json& descriptor, const Json& extrinsic) const;
  ledger::CallContract getInsurancePlan() const;
  ledger::CallContract getProviders() const;
  ledger::CallContract info() const;
};

}  // namespace dash::contracts
