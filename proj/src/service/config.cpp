#include "dash/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dash/error.hpp"
#include "dash/json_util.hpp"

namespace dash::service {

std::shared_ptr<Clock> ClockConfig::make() const {
  if (mode == "fixed") return std::make_shared<SteppingClock>(start, step);
  return std::make_shared<SystemClock>();
}

Json ServiceConfig::toJson() const {
  return Json{{"listen", Json{{"host", host}, {"port", port}}},
              {"dataDir", dataDir},
              {"recordBackend", recordBackend},
              {"autoMineThreshold", autoMineThreshold},
              {"adminKey", adminKey},
              {"clock", Json{{"mode", clock.mode}, {"start", clock.start}, {"step", clock.step}}},
              {"flyweightPlans", flyweightPlans},
              {"dedupNotifications", dedupNotifications},
              {"uiDir", uiDir},
              {"chain", chain.toJson()}};
}

ServiceConfig ServiceConfig::fromJson(const Json& j) {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  if (!j.is_object()) fail(kCode, "config must be a JSON object");
  static const std::set<std::string> known{"listen", "dataDir", "recordBackend", "autoMineThreshold",
                                           "adminKey", "clock", "flyweightPlans", "dedupNotifications",
                                           "uiDir", "chain", "difficulty", "gas"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) fail(kCode, "unknown config key '" + key + "'");

  ServiceConfig c;
  if (j.contains("listen")) {
    const auto& l = j.at("listen");
    if (l.contains("host")) c.host = json::str(l, "host", kCode);
    if (l.contains("port")) {
      auto p = json::u64(l, "port", kCode);
      if (p > 65535) fail(kCode, "listen.port out of range");
      c.port = static_cast<std::uint16_t>(p);
    }
  }
  if (j.contains("dataDir")) c.dataDir = json::str(j, "dataDir", kCode);
  if (j.contains("recordBackend")) c.recordBackend = json::str(j, "recordBackend", kCode);
  if (c.recordBackend != "memory" && c.recordBackend != "file")
    fail(kCode, "recordBackend must be 'memory' or 'file'");
  if (j.contains("autoMineThreshold")) c.autoMineThreshold = json::u64(j, "autoMineThreshold", kCode);
  if (j.contains("adminKey")) c.adminKey = json::str(j, "adminKey", kCode);
  if (c.adminKey.empty()) fail(kCode, "adminKey must be non-empty");
  if (j.contains("clock")) {
    const auto& k = j.at("clock");
    if (k.contains("mode")) c.clock.mode = json::str(k, "mode", kCode);
    if (c.clock.mode != "system" && c.clock.mode != "fixed") fail(kCode, "clock.mode must be 'system' or 'fixed'");
    if (k.contains("start")) c.clock.start = json::u64(k, "start", kCode);
    if (k.contains("step")) c.clock.step = json::u64(k, "step", kCode);
  }
  if (j.contains("flyweightPlans")) c.flyweightPlans = json::boolean(j, "flyweightPlans", kCode);
  if (j.contains("dedupNotifications")) c.dedupNotifications = json::boolean(j, "dedupNotifications", kCode);
  if (j.contains("uiDir")) c.uiDir = json::str(j, "uiDir", kCode);
  if (j.contains("chain")) c.chain = ledger::ChainConfig::fromJson(j.at("chain"));
  if (j.contains("difficulty")) {
    auto d = json::u64(j, "difficulty", kCode);
    if (d > 256) fail(kCode, "difficulty must be within [0, 256]");
    c.chain.difficulty = static_cast<std::uint32_t>(d);
  }
  if (j.contains("gas")) c.chain.gas = runtime::GasSchedule::fromJson(j.at("gas"));
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot read config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    canonicalDump(j);
  } catch (const Error& e) {
    fail(ErrorCode::InvalidArgument, std::string("config is not canonical-JSON compatible: ") + e.detail());
  }
  auto c = fromJson(j);
  // Relative data directories are taken relative to the config file.
  if (!c.dataDir.empty() && std::filesystem::path(c.dataDir).is_relative())
    c.dataDir = (file.parent_path() / c.dataDir).lexically_normal().string();
  return c;
}

void ServiceConfig::applyEnv() {
  if (const char* p = std::getenv("DASH_PORT"); p && *p) {
    char* end = nullptr;
    long v = std::strtol(p, &end, 10);
    if (*end != '\0' || v < 0 || v > 65535) fail(ErrorCode::InvalidArgument, "DASH_PORT is not a port number");
    port = static_cast<std::uint16_t>(v);
  }
  if (const char* d = std::getenv("DASH_DATA_DIR"); d && *d) dataDir = d;
}

}  // namespace dash::service
