#include "dash/runtime/runtime.hpp"

#include "dash/error.hpp"

namespace dash::runtime {

namespace {

// Converts library errors raised from inside contract code into reverts so
// that they unwind through the same frame-rollback path.
template <typename F>
auto asRevert(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Revert&) {
    throw;
  } catch (const OutOfGas&) {
    throw;
  } catch (const Error& e) {
    throw Revert(e.what());
  } catch (const Json::exception& e) {
    throw Revert(std::string("InvalidArguments: ") + e.what());
  }
}

}  // namespace

Executor::Executor(WorldState& state, const ContractTypeRegistry& types, GasMeter& gas, Address origin,
                   std::uint64_t blockHeight, std::uint32_t firstEventSequence)
    : state_(state),
      types_(types),
      gas_(gas),
      origin_(origin),
      blockHeight_(blockHeight),
      firstSequence_(firstEventSequence) {}

Json Executor::invoke(const Address& caller, const Address& target, std::string_view function, const Json& args) {
  const auto* acc = state_.find(target);
  if (!acc || acc->kind != AccountKind::SCA) throw Revert("NotAContract");
  const auto* type = types_.find(*acc->contractType);
  if (!type) throw Revert("UnknownContractType");
  auto fn = type->functions.find(function);
  if (fn == type->functions.end()) throw Revert("UnknownFunction");
  gas_.charge(1, 0, 0);
  CallContext ctx(*this, target, caller);
  return asRevert([&] { return fn->second(ctx, args); });
}

CallOutcome Executor::tryInvoke(const Address& caller, const Address& target, std::string_view function,
                                const Json& args) {
  const auto cp = state_.checkpoint();
  const auto eventCount = events_.size();
  try {
    return CallOutcome{true, invoke(caller, target, function, args), {}};
  } catch (const Revert& r) {
    state_.rollback(cp);
    events_.resize(eventCount);
    return CallOutcome{false, nullptr, r.reason};
  }
}

Address Executor::instantiate(const Address& creator, const ContractTypeId& typeId, const Json& ctorArgs) {
  const auto* type = types_.find(typeId);
  if (!type) throw Revert("UnknownContractType");
  const auto nonce = state_.get(creator).nonce;
  const auto addr = contractAddress(creator, nonce);
  if (state_.exists(addr)) throw Revert("AddressCollision");
  state_.setNonce(creator, nonce + 1);
  state_.createContractAccount(addr, typeId);
  gas_.charge(1, 0, 0);
  CallContext ctx(*this, addr, creator);
  try {
    asRevert([&] {
      if (type->constructor) type->constructor(ctx, ctorArgs);
      return 0;
    });
  } catch (const Revert& r) {
    throw Revert("ConstructorRevert: " + r.reason);
  }
  return addr;
}

std::optional<Json> Executor::load(const Address& self, std::string_view key) {
  gas_.charge(1, 0, 0);
  return state_.load(self, key);
}

void Executor::store(const Address& self, const std::string& key, Json value) {
  const auto bytes = asRevert([&] { return canonicalDump(value).size(); });
  gas_.charge(1, bytes, 0);
  state_.store(self, key, std::move(value));
}

void Executor::emit(const Address& self, std::string topic, Json payload) {
  asRevert([&] { return canonicalDump(payload).size(); });
  gas_.charge(0, 0, 1);
  const auto seq = firstSequence_ + static_cast<std::uint32_t>(events_.size());
  events_.push_back(ledger::Event{self, std::move(topic), std::move(payload), seq});
}

ledger::Receipt Runtime::apply(WorldState& state, const ledger::Transaction& tx, BlockContext& block,
                               std::uint32_t indexInBlock) const {
  ledger::Receipt receipt;
  receipt.txId = tx.id;
  receipt.blockHeight = block.height;
  receipt.indexInBlock = indexInBlock;

  auto reverted = [&](std::string reason) {
    receipt.status = ledger::TxStatus::Reverted;
    receipt.revertReason = std::move(reason);
  };

  const auto* sender = state.find(tx.sender);
  if (!sender || sender->kind != AccountKind::EOA) {
    reverted("UnknownSender");
    return receipt;
  }
  if (sender->nonce != tx.senderNonce) {
    reverted("NonceMismatch");
    return receipt;
  }

  unsigned __int128 upfront = tx.gasLimit;
  if (const auto* t = std::get_if<ledger::Transfer>(&tx.payload)) upfront += t->amount;
  if (sender->balance < upfront) {
    reverted("InsufficientFunds");
    state.setNonce(tx.sender, tx.senderNonce + 1);
    return receipt;
  }

  GasMeter gas(schedule_, tx.gasLimit);
  state.openJournal();
  const auto cp = state.checkpoint();
  Executor exec(state, types_, gas, tx.sender, block.height, block.nextEventSequence);
  try {
    gas.chargeFlat(schedule_.txBase);
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ledger::CreateContract>) {
            receipt.returnValue = exec.instantiate(tx.sender, ContractTypeId{p.typeId, p.version}, p.ctorArgs).hex();
          } else if constexpr (std::is_same_v<T, ledger::CallContract>) {
            auto value = exec.invoke(tx.sender, p.target, p.function, p.args);
            if (!value.is_null()) receipt.returnValue = std::move(value);
          } else {
            const auto* target = state.find(p.target);
            if (!target) throw Revert("UnknownTarget");
            if (p.target != tx.sender) {
              state.setBalance(tx.sender, state.get(tx.sender).balance - p.amount);
              state.setBalance(p.target, target->balance + p.amount);
            }
          }
        },
        tx.payload);
  } catch (const Revert& r) {
    state.rollback(cp);
    exec.events().clear();
    receipt.returnValue.reset();
    reverted(r.reason);
  } catch (const OutOfGas&) {
    state.rollback(cp);
    exec.events().clear();
    receipt.returnValue.reset();
    reverted("OutOfGas");
  }
  state.closeJournal();

  receipt.gasUsed = gas.used();
  receipt.events = std::move(exec.events());
  state.setNonce(tx.sender, tx.senderNonce + 1);
  state.setBalance(tx.sender, state.get(tx.sender).balance - receipt.gasUsed);
  block.feesCollected += receipt.gasUsed;
  block.nextEventSequence += static_cast<std::uint32_t>(receipt.events.size());
  return receipt;
}

CallResult Runtime::staticCall(WorldState& state, const Address& caller, const Address& target,
                               std::string_view function, const Json& args, std::uint64_t gasLimit,
                               std::uint64_t blockHeight) const {
  CallResult result;
  GasMeter gas(schedule_, gasLimit);
  state.openJournal();
  const auto cp = state.checkpoint();
  Executor exec(state, types_, gas, caller, blockHeight, 0);
  try {
    gas.chargeFlat(schedule_.txBase);
    result.value = exec.invoke(caller, target, function, args);
    result.events = std::move(exec.events());
  } catch (const Revert& r) {
    result.ok = false;
    result.reason = r.reason;
  } catch (const OutOfGas&) {
    result.ok = false;
    result.reason = "OutOfGas";
  }
  state.rollback(cp);
  state.closeJournal();
  result.gasUsed = gas.used();
  return result;
}

void Runtime::finalizeBlock(WorldState& state, const BlockContext& block, const Address& miner,
                            std::uint64_t reward) const {
  const auto& acc = state.get(miner);
  state.setBalance(miner, acc.balance + block.feesCollected + reward);
}

}  // namespace dash::runtime
