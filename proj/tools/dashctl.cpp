// dashctl: chain lifecycle, HTTP service, scenario replay and benchmarks.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

#include "dash/bench/bench.hpp"
#include "dash/error.hpp"
#include "dash/service/http_server.hpp"
#include "dash/service/scenario.hpp"
#include "dash/service/service.hpp"

namespace fs = std::filesystem;
using namespace dash;
using service::DashService;
using service::ServiceConfig;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Source {
  std::string config;
  std::string dataDir;

  ServiceConfig load(bool requireDataDir = true) const {
    ServiceConfig c;
    if (!config.empty()) c = ServiceConfig::load(config);
    c.applyEnv();
    if (!dataDir.empty()) c.dataDir = dataDir;
    if (requireDataDir && c.dataDir.empty()) throw UsageError("a data directory is required (--config or --data-dir)");
    return c;
  }
};

void addSource(CLI::App* cmd, Source& src) {
  cmd->add_option("-c,--config", src.config, "Service config file")->check(CLI::ExistingFile);
  cmd->add_option("-d,--data-dir", src.dataDir, "Data directory (overrides the config)");
}

void printJson(const Json& j) { std::cout << j.dump(2) << "\n"; }

int cmdInit(const std::string& configPath) {
  auto config = ServiceConfig::load(configPath);
  config.applyEnv();
  if (config.dataDir.empty()) throw UsageError("config has no dataDir; nothing to initialize");
  if (fs::exists(fs::path(config.dataDir) / "chain" / "genesis.json"))
    throw UsageError("data directory already initialized: " + config.dataDir);
  DashService svc(config);
  printJson(Json{{"dataDir", config.dataDir},
                 {"genesisHash", svc.chain().block(0).header.hash().hex()},
                 {"systemContracts", svc.system().toJson()},
                 {"admin", svc.chain().admin().hex()},
                 {"miner", svc.chain().miner().hex()}});
  return kOk;
}

int cmdServe(const std::string& configPath) {
  auto config = ServiceConfig::load(configPath);
  config.applyEnv();

  // Signals are taken synchronously by a dedicated thread so shutdown does
  // not run inside a handler.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  DashService svc(config);
  service::HttpServer server(svc);
  int port = server.bind(config.host, config.port);
  if (port < 0) throw std::runtime_error("cannot bind " + config.host + ":" + std::to_string(config.port));
  std::cout << "listening on " << config.host << ":" << port << " (height " << svc.chain().length() - 1 << ")"
            << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  server.run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

int cmdMine(const Source& src, std::optional<std::size_t> maxTxs) {
  DashService svc(src.load());
  auto block = svc.mine(svc.adminIdentity(), maxTxs);
  Json receipts = Json::array();
  for (const auto& r : svc.chain().blockReceipts(block.header.height)) receipts.push_back(r.toJson());
  printJson(Json{{"height", block.header.height},
                 {"hash", block.header.hash().hex()},
                 {"transactions", block.transactions.size()},
                 {"receipts", receipts}});
  return kOk;
}

int cmdValidate(const Source& src) {
  auto config = src.load();
  auto report = ledger::Blockchain::validateDirectory(fs::path(config.dataDir) / "chain");
  printJson(report.toJson());
  return report.valid ? kOk : kValidation;
}

int cmdInspect(const Source& src, const std::string& what, const std::string& key) {
  DashService svc(src.load());
  auto& chain = svc.chain();
  if (what == "block") {
    std::uint64_t h = 0;
    try {
      h = std::stoull(key);
    } catch (const std::exception&) {
      throw UsageError("block height must be a number");
    }
    Json receipts = Json::array();
    for (const auto& r : chain.blockReceipts(h)) receipts.push_back(r.toJson());
    printJson(Json{{"block", chain.block(h).toJson()}, {"receipts", receipts}});
  } else if (what == "tx") {
    Digest id;
    if (!Digest::tryFromHex(key, id)) throw UsageError("transaction id must be 64 lowercase hex digits");
    auto receipt = chain.receipt(id);
    const auto& tx = chain.block(receipt.blockHeight).transactions.at(receipt.indexInBlock);
    printJson(Json{{"transaction", tx.toJson()}, {"receipt", receipt.toJson()}});
  } else if (what == "account") {
    Address a;
    if (!Address::tryFromHex(key, a)) throw UsageError("account must be a 0x-prefixed 20-byte address");
    auto acc = chain.account(a);
    if (!acc) fail(ErrorCode::NotFound, "account " + key);
    printJson(acc->toJson());
  } else {
    throw UsageError("inspect expects block|tx|account");
  }
  return kOk;
}

int cmdScenario(const Source& src, const std::string& file) {
  ServiceConfig config;
  if (!src.config.empty() || !src.dataDir.empty()) {
    config = src.load(false);
  } else {
    // Default replay environment: in memory, fixed clock, easy difficulty.
    config.recordBackend = "memory";
    config.clock.mode = "fixed";
    config.clock.step = 1;
    config.chain.difficulty = 4;
  }
  std::ifstream in(file);
  if (!in) throw UsageError("cannot read scenario " + file);
  DashService svc(config);
  auto summary = service::runScenario(svc, in, std::cout);
  std::cerr << summary.steps << " steps, " << summary.failures << " unexpected statuses, " << svc.chain().length()
            << " blocks, " << svc.chain().receiptCount() << " receipts\n";
  return summary.failures == 0 ? kOk : kRuntime;
}

void writeCsv(const std::string& path, const std::string& header, const std::vector<std::string>& rows) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << "\n";
  for (const auto& r : rows) out << r << "\n";
}

int cmdBenchFlyweight(const bench::FlyweightOptions& base, bool noFlyweight, const std::string& csv) {
  std::vector<bench::FlyweightReport> reports;
  if (!noFlyweight) {
    auto o = base;
    o.flyweight = true;
    reports.push_back(bench::runFlyweight(o));
  }
  auto o = base;
  o.flyweight = false;
  reports.push_back(bench::runFlyweight(o));

  std::cout << bench::FlyweightReport::csvHeader() << "\n";
  std::vector<std::string> rows;
  for (const auto& r : reports) {
    rows.push_back(r.csvRow());
    std::cout << rows.back() << "\n";
  }
  std::cout << "\n"
            << std::left << std::setw(10) << "mode" << std::right << std::setw(10) << "patients" << std::setw(8)
            << "plans" << std::setw(14) << "descriptors" << std::setw(14) << "plan bytes" << std::setw(14)
            << "ref bytes" << std::setw(14) << "plan gas" << "\n";
  for (const auto& r : reports)
    std::cout << std::left << std::setw(10) << (r.flyweight ? "flyweight" : "inline") << std::right << std::setw(10)
              << r.patients << std::setw(8) << r.plans << std::setw(14) << r.storedDescriptors << std::setw(14)
              << r.planBytes << std::setw(14) << r.referenceBytes << std::setw(14) << r.planGas << "\n";
  if (reports.size() == 2 && reports[0].planBytes > 0)
    std::cout << "plan bytes ratio (inline / flyweight): "
              << static_cast<double>(reports[1].planBytes) / static_cast<double>(reports[0].planBytes) << "\n";
  writeCsv(csv, bench::FlyweightReport::csvHeader(), rows);
  return kOk;
}

int cmdBenchPubsub(const bench::PubsubOptions& options, const std::string& csv) {
  auto r = bench::runPubsub(options);
  std::cout << bench::PubsubReport::csvHeader() << "\n" << r.csvRow() << "\n\n";
  std::cout << "providers            " << r.providers << "\n"
            << "blocks               " << r.blocks << "\n"
            << "events               " << r.events << "\n"
            << "pub/sub work         " << r.pubsubWork << "\n"
            << "expected matches     " << r.expectedMatches << "\n"
            << "delivered            " << r.delivered << "\n";
  if (r.polling)
    std::cout << "polling scans        " << r.pollingScans << "\n"
              << "polling events found " << r.pollingFound << "\n"
              << "ratio (polling/pub)  " << r.ratio << "\n";
  std::cout << "wall seconds         " << r.seconds << "\n";
  writeCsv(csv, bench::PubsubReport::csvHeader(), {r.csvRow()});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dashctl: health-record exchange chain operator tool"};
  app.require_subcommand(1);

  std::string configPath;
  auto* init = app.add_subcommand("init", "Write genesis and instantiate the system contracts");
  init->add_option("config", configPath, "Service config file")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("config", configPath, "Service config file")->required()->check(CLI::ExistingFile);

  Source src;
  std::optional<std::size_t> maxTxs;
  auto* mine = app.add_subcommand("mine", "Mine one block from the persisted mempool");
  addSource(mine, src);
  mine->add_option("--max-txs", maxTxs, "Transaction cap for this block")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Validate the chain on disk");
  addSource(validate, src);

  std::string what, key;
  auto* inspect = app.add_subcommand("inspect", "Show a block, transaction or account");
  addSource(inspect, src);
  inspect->add_option("kind", what, "block | tx | account")->required()->check(CLI::IsMember({"block", "tx", "account"}));
  inspect->add_option("key", key, "Height, transaction id or address")->required();

  std::string scenarioFile;
  auto* scenario = app.add_subcommand("scenario", "Scenario replay");
  scenario->require_subcommand(1);
  auto* scenarioRun = scenario->add_subcommand("run", "Replay a JSON-lines script of API calls");
  addSource(scenarioRun, src);
  scenarioRun->add_option("file", scenarioFile, "Scenario file")->required();

  auto* bench = app.add_subcommand("bench", "Benchmarks");
  bench->require_subcommand(1);
  bench::FlyweightOptions fly;
  bool noFlyweight = false;
  std::string csv;
  auto* benchFly = bench->add_subcommand("flyweight", "Insurance plan storage with and without interning");
  benchFly->add_option("--patients", fly.patients, "Patients to onboard")->required();
  benchFly->add_option("--plans", fly.plans, "Distinct plans")->required()->check(CLI::PositiveNumber);
  benchFly->add_flag("--no-flyweight", noFlyweight, "Run only the inline baseline");
  benchFly->add_option("--difficulty", fly.difficulty, "PoW difficulty bits");
  benchFly->add_option("--csv", csv, "Also write the CSV to this file");

  bench::PubsubOptions ps;
  auto* benchPs = bench->add_subcommand("pubsub", "Notification dispatch versus polling");
  benchPs->add_option("--providers", ps.providers, "Providers (one watched patient each)")->required()->check(CLI::PositiveNumber);
  benchPs->add_option("--blocks", ps.blocks, "Blocks to mine")->required()->check(CLI::PositiveNumber);
  benchPs->add_option("--events", ps.events, "Prescription requests to spread over the blocks")->required();
  benchPs->add_flag("--polling", ps.polling, "Also run the polling baseline");
  benchPs->add_option("--difficulty", ps.difficulty, "PoW difficulty bits");
  benchPs->add_option("--seed", ps.seed, "Workload seed");
  benchPs->add_option("--csv", csv, "Also write the CSV to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*init) return cmdInit(configPath);
    if (*serve) return cmdServe(configPath);
    if (*mine) return cmdMine(src, maxTxs);
    if (*validate) return cmdValidate(src);
    if (*inspect) return cmdInspect(src, what, key);
    if (*scenarioRun) return cmdScenario(src, scenarioFile);
    if (*benchFly) return cmdBenchFlyweight(fly, noFlyweight, csv);
    if (*benchPs) return cmdBenchPubsub(ps, csv);
  } catch (const UsageError& e) {
    std::cerr << "dashctl: " << e.what() << "\n";
    return kUsage;
  } catch (const service::ApiError& e) {
    std::cerr << "dashctl: " << e.what() << (e.revertReason().empty() ? "" : " (" + e.revertReason() + ")") << "\n";
    return kRuntime;
  } catch (const Error& e) {
    std::cerr << "dashctl: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArgument ? kUsage : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "dashctl: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
