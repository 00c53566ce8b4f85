#include "dash/ledger/chain_config.hpp"

#include "dash/json_util.hpp"

namespace dash::ledger {

Json ChainConfig::toJson() const {
  return Json{{"difficulty", difficulty},
              {"gasSchedule", gas.toJson()},
              {"faucetAmount", faucetAmount},
              {"minerLabel", minerLabel},
              {"adminLabel", adminLabel},
              {"blockReward", blockReward},
              {"maxTxsPerBlock", maxTxsPerBlock},
              {"allowEmptyBlocks", allowEmptyBlocks},
              {"defaultGasLimit", defaultGasLimit},
              {"staticCallGasLimit", staticCallGasLimit},
              {"systemContracts", systemContracts}};
}

ChainConfig ChainConfig::fromJson(const Json& j) {
  // Every field optional; absent fields keep their defaults.
  constexpr auto kCode = ErrorCode::InvalidArgument;
  ChainConfig c;
  if (j.contains("difficulty")) {
    auto d = json::u64(j, "difficulty", kCode);
    if (d > 256) fail(kCode, "difficulty must be within [0, 256]");
    c.difficulty = static_cast<std::uint32_t>(d);
  }
  if (j.contains("gasSchedule")) c.gas = runtime::GasSchedule::fromJson(j.at("gasSchedule"));
  if (j.contains("faucetAmount")) c.faucetAmount = json::u64(j, "faucetAmount", kCode);
  if (j.contains("minerLabel")) c.minerLabel = json::str(j, "minerLabel", kCode);
  if (j.contains("adminLabel")) c.adminLabel = json::str(j, "adminLabel", kCode);
  if (j.contains("blockReward")) c.blockReward = json::u64(j, "blockReward", kCode);
  if (j.contains("maxTxsPerBlock")) c.maxTxsPerBlock = json::u64(j, "maxTxsPerBlock", kCode);
  if (j.contains("allowEmptyBlocks")) c.allowEmptyBlocks = json::boolean(j, "allowEmptyBlocks", kCode);
  if (j.contains("defaultGasLimit")) c.defaultGasLimit = json::u64(j, "defaultGasLimit", kCode);
  if (j.contains("staticCallGasLimit")) c.staticCallGasLimit = json::u64(j, "staticCallGasLimit", kCode);
  if (j.contains("systemContracts")) c.systemContracts = j.at("systemContracts");
  if (c.maxTxsPerBlock == 0) fail(kCode, "maxTxsPerBlock must be positive");
  return c;
}

}  // namespace dash::ledger
