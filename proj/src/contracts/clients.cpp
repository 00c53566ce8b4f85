#include "dash/contracts/clients.hpp"

namespace dash::contracts {

using ledger::CallContract;

CallContract RegistryClient::lookupOrCreate(const std::string& patientId) const {
  return {address, "lookupOrCreate", Json{{"patientId", patientId}}};
}
CallContract RegistryClient::get(const std::string& patientId) const {
  return {address, "get", Json{{"patientId", patientId}}};
}

CallContract FactoryClient::create(const std::string& userType, Json params) const {
  return {address, "create", Json{{"userType", userType}, {"params", std::move(params)}}};
}
CallContract FactoryClient::setActiveVersion(const std::string& userType, const std::string& typeId,
                                             std::uint32_t version) const {
  return {address, "setActiveVersion", Json{{"userType", userType}, {"typeId", typeId}, {"version", version}}};
}
CallContract FactoryClient::isProvider(const Address& eoa) const {
  return {address, "isProvider", Json{{"address", eoa.hex()}}};
}

CallContract PlanStoreClient::intern(const Json& descriptor) const {
  return {address, "intern", Json{{"descriptor", descriptor}}};
}
CallContract PlanStoreClient::get(const Digest& planRef) const {
  return {address, "get", Json{{"planRef", planRef.hex()}}};
}

CallContract PatientAccountClient::grantAccess(const Address& provider) const {
  return {address, "grantAccess", Json{{"provider", provider.hex()}}};
}
CallContract PatientAccountClient::revokeAccess(const Address& provider) const {
  return {address, "revokeAccess", Json{{"provider", provider.hex()}}};
}
CallContract PatientAccountClient::appendRecord(const Digest& recordHash, const std::string& pointer,
                                                const std::string& resourceType) const {
  return {address, "appendRecord",
          Json{{"recordHash", recordHash.hex()}, {"pointer", pointer}, {"resourceType", resourceType}}};
}
CallContract PatientAccountClient::listRecords() const { return {address, "listRecords", Json::object()}; }
CallContract PatientAccountClient::requestPrescription(const std::string& medicationCode) const {
  return {address, "requestPrescription", Json{{"medicationCode", medicationCode}}};
}
CallContract PatientAccountClient::fulfillPrescription(std::uint64_t requestId, const Digest& recordHash,
                                                       const std::string& pointer) const {
  return {address, "fulfillPrescription",
          Json{{"requestId", requestId}, {"recordHash", recordHash.hex()}, {"pointer", pointer}}};
}
CallContract PatientAccountClient::listPrescriptions() const { return {address, "listPrescriptions", Json::object()}; }
CallContract PatientAccountClient::setInsurancePlan(const Digest& planRef, const Json& extrinsic) const {
  return {address, "setInsurancePlan", Json{{"planRef", planRef.hex()}, {"extrinsic", extrinsic}}};
}
CallContract PatientAccountClient::setInsurancePlanInline(const Json& descriptor, const Json& extrinsic) const {
  return {address, "setInsurancePlanInline", Json{{"descriptor", descriptor}, {"extrinsic", extrinsic}}};
}
CallContract PatientAccountClient::getInsurancePlan() const { return {address, "getInsurancePlan", Json::object()}; }
CallContract PatientAccountClient::getProviders() const { return {address, "getProviders", Json::object()}; }
CallContract PatientAccountClient::info() const { return {address, "info", Json::object()}; }

}  // namespace dash::contracts
