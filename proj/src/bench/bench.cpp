#include "dash/bench/bench.hpp"

#include <chrono>
#include <random>
#include <set>
#include <sstream>

#include "dash/service/service.hpp"

namespace dash::bench {

namespace {

using service::DashService;
using service::ServiceConfig;

ServiceConfig benchConfig(std::uint32_t difficulty) {
  ServiceConfig c;
  c.recordBackend = "memory";
  c.clock.mode = "fixed";
  c.clock.start = 1'700'000'000;
  c.clock.step = 1;
  c.chain.difficulty = difficulty;
  c.chain.allowEmptyBlocks = true;
  return c;
}

Json demographics(const std::string& patientId, std::size_t i) {
  return Json{{"resourceType", "Patient"},
              {"id", patientId},
              {"attributes", Json{{"name", "Patient " + std::to_string(i)}, {"birthDate", "1980-01-01"}}}};
}

Json planDescriptor(std::size_t k) {
  return Json{{"payerName", "Payer " + std::to_string(k) + " Mutual Health Insurance Company"},
              {"planCode", "PLAN-" + std::to_string(1000 + k)},
              {"coverageTier", k % 2 == 0 ? "Gold PPO Family" : "Silver HMO Individual"}};
}

double secondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Json FlyweightReport::toJson() const {
  return Json{{"patients", patients},         {"plans", plans},
              {"flyweight", flyweight},       {"storedDescriptors", storedDescriptors},
              {"planBytes", planBytes},       {"referenceBytes", referenceBytes},
              {"planGas", planGas},           {"seconds", fmt(seconds)}};
}

std::string FlyweightReport::csvHeader() {
  return "mode,patients,plans,stored_descriptors,plan_bytes,reference_bytes,plan_gas,seconds";
}

std::string FlyweightReport::csvRow() const {
  std::ostringstream os;
  os << (flyweight ? "flyweight" : "inline") << ',' << patients << ',' << plans << ',' << storedDescriptors << ','
     << planBytes << ',' << referenceBytes << ',' << planGas << ',' << fmt(seconds);
  return os.str();
}

FlyweightReport runFlyweight(const FlyweightOptions& options) {
  if (options.plans == 0) fail(ErrorCode::InvalidArgument, "plans must be positive");
  auto start = std::chrono::steady_clock::now();
  auto config = benchConfig(options.difficulty);
  config.flyweightPlans = options.flyweight;
  DashService svc(config);
  auto admin = svc.adminIdentity();

  FlyweightReport report;
  report.patients = options.patients;
  report.plans = options.plans;
  report.flyweight = options.flyweight;

  std::vector<Address> accounts;
  accounts.reserve(options.patients);
  for (std::size_t i = 0; i < options.patients; ++i) {
    service::OnboardRequest req;
    req.patientId = "bench-" + std::to_string(i);
    req.demographics = demographics(req.patientId, i);
    req.plan = planDescriptor(i % options.plans);
    req.extrinsic = Json{{"memberNumber", "M" + std::to_string(100000 + i)}, {"groupCode", "G" + std::to_string(i % 17)}};
    auto res = svc.onboardPatient(admin, req);
    for (const auto& [step, receipt] : res.receipts)
      if (step == "intern" || step == "setInsurancePlan") report.planGas += receipt.gasUsed;
    accounts.push_back(res.account);
  }

  const auto planStore = svc.system().planStore;
  svc.chain().withState([&](const runtime::WorldState& state) {
    report.planBytes = state.storageBytes(planStore, "plan/");
    if (const auto* acc = state.find(planStore)) {
      for (auto it = acc->storage.lower_bound("plan/"); it != acc->storage.end() && it->first.starts_with("plan/"); ++it)
        ++report.storedDescriptors;
    }
    for (const auto& a : accounts) {
      auto inlineBytes = state.storageBytes(a, "planDescriptor");
      if (inlineBytes > 0) ++report.storedDescriptors;
      report.planBytes += inlineBytes;
      report.referenceBytes += state.storageBytes(a, "planRef") + state.storageBytes(a, "planExtrinsic");
    }
    return 0;
  });
  report.seconds = secondsSince(start);
  return report;
}

Json PubsubReport::toJson() const {
  Json j{{"providers", providers},   {"blocks", blocks},
         {"events", events},         {"pubsubWork", pubsubWork},
         {"expectedMatches", expectedMatches}, {"delivered", delivered},
         {"seconds", fmt(seconds)}};
  if (polling) {
    j["pollingScans"] = pollingScans;
    j["pollingFound"] = pollingFound;
    j["ratio"] = fmt(ratio);
  }
  return j;
}

std::string PubsubReport::csvHeader() {
  return "providers,blocks,events,pubsub_work,expected_matches,delivered,polling_scans,polling_found,ratio,seconds";
}

std::string PubsubReport::csvRow() const {
  std::ostringstream os;
  os << providers << ',' << blocks << ',' << events << ',' << pubsubWork << ',' << expectedMatches << ',' << delivered
     << ',';
  if (polling)
    os << pollingScans << ',' << pollingFound << ',' << fmt(ratio);
  else
    os << ",,";
  os << ',' << fmt(seconds);
  return os.str();
}

PubsubReport runPubsub(const PubsubOptions& options) {
  if (options.providers == 0) fail(ErrorCode::InvalidArgument, "providers must be positive");
  auto start = std::chrono::steady_clock::now();
  auto config = benchConfig(options.difficulty);
  config.autoMineThreshold = 0;
  DashService svc(config);
  auto admin = svc.adminIdentity();

  std::vector<service::Identity> patients;
  std::vector<service::Identity> providers;
  pubsub::PollingBaseline polling;
  for (std::size_t i = 0; i < options.providers; ++i) {
    auto pid = "sub-patient-" + std::to_string(i);
    service::OnboardRequest req;
    req.patientId = pid;
    req.demographics = demographics(pid, i);
    req.plan = planDescriptor(0);
    auto res = svc.onboardPatient(admin, req);
    patients.push_back(res.identity);
    auto provider = svc.onboardProvider(admin, "sub-provider-" + std::to_string(i), "Clinic " + std::to_string(i));
    providers.push_back(provider);
    svc.subscribe(provider, Json{{"patientId", pid}});
    polling.watch(provider.eoaLabel, res.account);
  }

  PubsubReport report;
  report.providers = options.providers;
  report.blocks = options.blocks;
  report.events = options.events;
  report.polling = options.polling;

  svc.dispatcher().resetWorkCounter();
  std::vector<std::size_t> feedBefore;
  for (const auto& p : providers) feedBefore.push_back(svc.dispatcher().poll(p.eoaLabel, -1).size());
  auto subs = svc.dispatcher().subscriptions();

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, patients.size() - 1);
  for (std::size_t b = 0; b < options.blocks; ++b) {
    std::size_t count = options.events / options.blocks + (b < options.events % options.blocks ? 1 : 0);
    for (std::size_t e = 0; e < count; ++e) {
      const auto& patient = patients[pick(rng)];
      svc.requestPrescription(patient, patient.patientId, "RX-" + std::to_string(b) + "-" + std::to_string(e));
    }
    auto block = svc.mine(admin, std::nullopt);
    auto receipts = svc.chain().blockReceipts(block.header.height);
    if (options.polling) polling.scanBlock(block.header.height, receipts);

    // Brute force over every subscription, independent of the dispatcher's index.
    for (const auto& r : receipts) {
      for (const auto& ev : r.events) {
        std::set<std::string> matched;
        for (const auto& s : subs)
          if (s.activeFor(block.header.height) && s.filter.matches(ev)) matched.insert(s.subscriberId);
        report.expectedMatches += matched.size();
      }
    }
  }

  report.pubsubWork = svc.dispatcher().workCounter();
  for (std::size_t i = 0; i < providers.size(); ++i)
    report.delivered += svc.dispatcher().poll(providers[i].eoaLabel, -1).size() - feedBefore[i];
  report.pollingScans = polling.scans();
  report.pollingFound = polling.eventsFound();
  if (options.polling)
    report.ratio = report.pubsubWork == 0 ? static_cast<double>(report.pollingScans)
                                          : static_cast<double>(report.pollingScans) / static_cast<double>(report.pubsubWork);
  report.seconds = secondsSince(start);
  return report;
}

}  // namespace dash::bench
