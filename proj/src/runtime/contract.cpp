#include "dash/runtime/contract.hpp"

#include "dash/error.hpp"
#include "dash/runtime/runtime.hpp"

namespace dash::runtime {

const Address& CallContext::origin() const { return exec_.origin(); }
std::uint64_t CallContext::blockHeight() const { return exec_.blockHeight(); }

std::optional<Json> CallContext::load(std::string_view key) { return exec_.load(self_, key); }

Json CallContext::loadOr(std::string_view key, Json fallback) {
  auto v = exec_.load(self_, key);
  return v ? std::move(*v) : std::move(fallback);
}

void CallContext::store(const std::string& key, Json value) { exec_.store(self_, key, std::move(value)); }

void CallContext::emit(std::string topic, Json payload) { exec_.emit(self_, std::move(topic), std::move(payload)); }

Json CallContext::call(const Address& target, std::string_view function, const Json& args) {
  return exec_.invoke(self_, target, function, args);
}

CallOutcome CallContext::tryCall(const Address& target, std::string_view function, const Json& args) {
  return exec_.tryInvoke(self_, target, function, args);
}

Address CallContext::create(const std::string& typeId, std::uint32_t version, const Json& ctorArgs) {
  return exec_.instantiate(self_, ContractTypeId{typeId, version}, ctorArgs);
}

bool CallContext::isRegistered(const std::string& typeId, std::uint32_t version) const {
  return exec_.types().contains(ContractTypeId{typeId, version});
}

std::optional<ContractTypeId> CallContext::contractTypeOf(const Address& a) const {
  const auto* acc = exec_.state().find(a);
  if (!acc || acc->kind != AccountKind::SCA) return std::nullopt;
  return acc->contractType;
}

void ContractTypeRegistry::add(ContractType type) {
  auto id = type.id;
  if (!types_.emplace(id, std::move(type)).second) fail(ErrorCode::InvalidArgument, "duplicate contract type " + id.str());
}

const ContractType* ContractTypeRegistry::find(const ContractTypeId& id) const {
  auto it = types_.find(id);
  return it == types_.end() ? nullptr : &it->second;
}

std::vector<ContractTypeId> ContractTypeRegistry::list() const {
  std::vector<ContractTypeId> out;
  for (const auto& [id, _] : types_) out.push_back(id);
  return out;
}

}  // namespace dash::runtime
