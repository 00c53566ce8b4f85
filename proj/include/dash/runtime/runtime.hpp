#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dash/ledger/event.hpp"
#include "dash/ledger/receipt.hpp"
#include "dash/ledger/transaction.hpp"
#include "dash/runtime/contract.hpp"
#include "dash/runtime/gas.hpp"
#include "dash/runtime/world_state.hpp"

namespace dash::runtime {

struct BlockContext {
  std::uint64_t height = 0;
  std::uint32_t nextEventSequence = 0;
  std::uint64_t feesCollected = 0;
};

/// Per-transaction execution engine: owns the gas meter and the event
/// buffer, and runs call frames against the world state.
class Executor {
 public:
  Executor(WorldState& state, const ContractTypeRegistry& types, GasMeter& gas, Address origin,
           std::uint64_t blockHeight, std::uint32_t firstEventSequence);

  Json invoke(const Address& caller, const Address& target, std::string_view function, const Json& args);
  CallOutcome tryInvoke(const Address& caller, const Address& target, std::string_view function, const Json& args);
  Address instantiate(const Address& creator, const ContractTypeId& type, const Json& ctorArgs);

  std::optional<Json> load(const Address& self, std::string_view key);
  void store(const Address& self, const std::string& key, Json value);
  void emit(const Address& self, std::string topic, Json payload);

  WorldState& state() { return state_; }
  const ContractTypeRegistry& types() const { return types_; }
  GasMeter& gas() { return gas_; }
  const Address& origin() const { return origin_; }
  std::uint64_t blockHeight() const { return blockHeight_; }
  std::vector<ledger::Event>& events() { return events_; }

 private:
  WorldState& state_;
  const ContractTypeRegistry& types_;
  GasMeter& gas_;
  Address origin_;
  std::uint64_t blockHeight_;
  std::uint32_t firstSequence_;
  std::vector<ledger::Event> events_;
};

struct CallResult {
  bool ok = true;
  std::string reason;
  Json value;
  std::uint64_t gasUsed = 0;
  std::vector<ledger::Event> events;
};

/// Applies transactions to a world state. Stateless apart from its
/// configuration, so one instance can serve any number of states.
class Runtime {
 public:
  Runtime(const ContractTypeRegistry& types, GasSchedule schedule) : types_(types), schedule_(schedule) {}

  /// Executes one transaction, producing its receipt. Reverted transactions leave
  /// the state untouched except for the sender's nonce and gas debit.
  ledger::Receipt apply(WorldState& state, const ledger::Transaction& tx, BlockContext& block,
                        std::uint32_t indexInBlock) const;

  /// Runs a call against the state and rolls everything back afterwards.
  CallResult staticCall(WorldState& state, const Address& caller, const Address& target, std::string_view function,
                        const Json& args, std::uint64_t gasLimit, std::uint64_t blockHeight) const;

  /// Credits collected fees plus the flat block reward to the miner.
  void finalizeBlock(WorldState& state, const BlockContext& block, const Address& miner, std::uint64_t reward) const;

  const GasSchedule& schedule() const { return schedule_; }
  const ContractTypeRegistry& types() const { return types_; }

 private:
  const ContractTypeRegistry& types_;
  GasSchedule schedule_;
};

}  // namespace dash::runtime
