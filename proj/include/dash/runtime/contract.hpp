#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dash/bytes.hpp"
#include "dash/hash.hpp"
#include "dash/runtime/world_state.hpp"

namespace dash::runtime {

class Executor;

/// Thrown by contract code to abort the current call frame.
struct Revert : std::runtime_error {
  explicit Revert(std::string reason) : std::runtime_error(reason), reason(std::move(reason)) {}
  std::string reason;
};

struct CallOutcome {
  bool ok = true;
  Json value;
  std::string reason;
};

/// What a running contract function sees: its own address, the immediate
/// caller, metered storage, event emission and nested calls/creations.
class CallContext {
 public:
  CallContext(Executor& exec, Address self, Address caller) : exec_(exec), self_(self), caller_(caller) {}

  const Address& self() const { return self_; }
  const Address& caller() const { return caller_; }
  const Address& origin() const;
  std::uint64_t blockHeight() const;

  std::optional<Json> load(std::string_view key);
  Json loadOr(std::string_view key, Json fallback);
  void store(const std::string& key, Json value);
  void emit(std::string topic, Json payload);

  /// Nested call; a revert in the callee propagates.
  Json call(const Address& target, std::string_view function, const Json& args);
  /// Nested call; a revert in the callee is rolled back and reported. OutOfGas still propagates.
  CallOutcome tryCall(const Address& target, std::string_view function, const Json& args);
  Address create(const std::string& typeId, std::uint32_t version, const Json& ctorArgs);

  bool isRegistered(const std::string& typeId, std::uint32_t version) const;
  std::optional<ContractTypeId> contractTypeOf(const Address& a) const;

  [[noreturn]] void revert(std::string reason) const { throw Revert(std::move(reason)); }
  void require(bool cond, const char* reason) const {
    if (!cond) throw Revert(reason);
  }

 private:
  Executor& exec_;
  Address self_;
  Address caller_;
};

using ContractFunction = std::function<Json(CallContext&, const Json& args)>;

struct ContractType {
  ContractTypeId id;
  ContractFunction constructor;
  std::map<std::string, ContractFunction, std::less<>> functions;
};

/// (typeId, version) -> native implementation. Entries are immutable once added.
class ContractTypeRegistry {
 public:
  void add(ContractType type);  // throws InvalidArgument on duplicate
  const ContractType* find(const ContractTypeId& id) const;
  bool contains(const ContractTypeId& id) const { return find(id) != nullptr; }
  std::vector<ContractTypeId> list() const;

 private:
  std::map<ContractTypeId, ContractType> types_;
};

}  // namespace dash::runtime
