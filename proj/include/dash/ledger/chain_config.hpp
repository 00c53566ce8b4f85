#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "dash/hash.hpp"
#include "dash/runtime/gas.hpp"

namespace dash::ledger {

/// Contents of the genesis file.
struct ChainConfig {
  std::uint32_t difficulty = 12;
  runtime::GasSchedule gas;
  std::uint64_t faucetAmount = 1'000'000'000'000;
  std::string minerLabel = "miner";
  std::string adminLabel = "admin";
  std::uint64_t blockReward = 0;
  std::size_t maxTxsPerBlock = 256;
  bool allowEmptyBlocks = false;
  std::uint64_t defaultGasLimit = 10'000'000;
  std::uint64_t staticCallGasLimit = 1'000'000'000;
  /// Addresses of the singleton system contracts, filled in at genesis.
  Json systemContracts = Json::object();

  Json toJson() const;
  static ChainConfig fromJson(const Json& j);
};

}  // namespace dash::ledger
