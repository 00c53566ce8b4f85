#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "dash/clock.hpp"
#include "dash/hash.hpp"
#include "dash/ledger/chain_config.hpp"

namespace dash::service {

struct ClockConfig {
  std::string mode = "system";  // "system" | "fixed"
  std::uint64_t start = 1'700'000'000;
  std::uint64_t step = 0;

  std::shared_ptr<Clock> make() const;
};

/// Loaded from a canonical-JSON file. Unknown keys are rejected so typos
/// do not silently fall back to defaults.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::string dataDir;               // empty: everything in memory
  std::string recordBackend = "file";
  std::size_t autoMineThreshold = 1; // 0: manual mining via /admin/mine
  std::string adminKey = "dash-admin";
  ClockConfig clock;
  bool flyweightPlans = true;
  bool dedupNotifications = true;
  std::string uiDir;                 // optional static assets under /ui
  ledger::ChainConfig chain;         // "difficulty" and "gas" may also be given at top level

  Json toJson() const;
  static ServiceConfig fromJson(const Json& j);  // throws InvalidArgument
  static ServiceConfig load(const std::filesystem::path& file);
  /// DASH_PORT and DASH_DATA_DIR override the file.
  void applyEnv();
};

}  // namespace dash::service
