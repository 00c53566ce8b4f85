#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "dash/service/api.hpp"
#include "dash/service/http_server.hpp"
#include "dash/service/scenario.hpp"
#include "temp_dir.hpp"

using namespace dash;
using namespace dash::service;
using dash::testing::TempDir;

namespace {

ServiceConfig memoryConfig(std::size_t autoMine = 1) {
  ServiceConfig c;
  c.clock.mode = "fixed";
  c.clock.step = 1;
  c.autoMineThreshold = autoMine;
  c.chain.difficulty = 0;
  return c;
}

struct Api {
  DashService& service;
  ApiRouter router{service};

  ApiResponse call(const std::string& key, const std::string& method, const std::string& target,
                   const Json& body = nullptr) {
    auto req = parseTarget(method, target);
    req.authorization = "Bearer " + key;
    if (!body.is_null()) req.body = body.dump();
    return router.handle(req);
  }
};

Json demographics(const std::string& id) {
  return Json{{"resourceType", "Patient"}, {"id", id}, {"attributes", {{"name", "Ann"}, {"birthDate", "1980-02-02"}}}};
}

Json onboardBody(const std::string& id) {
  return Json{{"patientId", id},
              {"demographics", demographics(id)},
              {"plan", {{"payerName", "Acme"}, {"planCode", "GOLD"}, {"coverageTier", "family"}}},
              {"extrinsic", {{"memberNumber", "M1"}, {"groupCode", "G1"}}}};
}

Json observation(const std::string& id, int value) {
  return Json{{"resourceType", "Observation"}, {"id", id}, {"attributes", {{"code", "8867-4"}, {"value", value}}}};
}

struct World {
  DashService service;
  Api api{service};
  std::string admin, patient, doc, otherDoc;

  explicit World(ServiceConfig c = memoryConfig()) : service(std::move(c)) {
    admin = service.config().adminKey;
    doc = api.call(admin, "POST", "/admin/providers", Json{{"providerId", "dr-a"}, {"name", "A"}}).body.at("apiKey");
    otherDoc = api.call(admin, "POST", "/admin/providers", Json{{"providerId", "dr-b"}, {"name", "B"}}).body.at("apiKey");
    auto r = api.call(admin, "POST", "/admin/patients", onboardBody("p-1"));
    EXPECT_EQ(r.status, 201) << r.body.dump();
    patient = r.body.at("apiKey");
  }

  const ledger::Transaction* findTx(const Digest& id) {
    auto& chain = service.chain();
    for (std::uint64_t h = 0; h < chain.length(); ++h)
      for (const auto& tx : chain.block(h).transactions)
        if (tx.id == id) return &tx;
    return nullptr;
  }
};

}  // namespace

TEST(Api, OnboardingFlowEndToEnd) {
  World w;
  auto me = w.api.call(w.patient, "GET", "/me");
  EXPECT_EQ(me.body.at("role"), "patient");
  EXPECT_FALSE(me.body.contains("apiKey"));

  auto grant = w.api.call(w.patient, "POST", "/patients/p-1/permissions", Json{{"provider", "dr-a"}, {"action", "grant"}});
  ASSERT_EQ(grant.status, 200) << grant.body.dump();
  EXPECT_EQ(grant.body.at("receipt").at("status"), "success");

  auto write = w.api.call(w.doc, "POST", "/patients/p-1/records", observation("obs-1", 70));
  ASSERT_EQ(write.status, 201) << write.body.dump();
  EXPECT_EQ(write.body.at("entryIndex"), Json(1));  // 0 is the demographics entry

  // Read-your-writes: a 201 is visible to the next read by either party.
  for (const auto& key : {w.doc, w.patient}) {
    auto read = w.api.call(key, "GET", "/patients/p-1/records");
    ASSERT_EQ(read.status, 200);
    const auto& records = read.body.at("records");
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].at("resource").at("resourceType"), "Patient");
    EXPECT_EQ(records[1].at("resource").at("attributes").at("value"), Json(70));
    EXPECT_EQ(records[1].at("entry").at("recordHash"), write.body.at("recordHash"));
  }
  auto audit = w.service.records().auditLog().entries();
  ASSERT_FALSE(audit.empty());
  EXPECT_EQ(audit.back().accessorId, "patient:p-1");

  auto rx = w.api.call(w.patient, "POST", "/patients/p-1/prescriptions", Json{{"medicationCode", "RX-9"}});
  ASSERT_EQ(rx.status, 201) << rx.body.dump();
  EXPECT_EQ(rx.body.at("requestId"), Json(0));
  Json medication{{"resourceType", "MedicationRequest"}, {"id", "mr-1"}, {"attributes", {{"medicationCode", "RX-9"}}}};
  EXPECT_EQ(w.api.call(w.otherDoc, "POST", "/patients/p-1/prescriptions/0/fulfill", medication).status, 403);
  EXPECT_EQ(w.api.call(w.doc, "POST", "/patients/p-1/prescriptions/0/fulfill", medication).status, 201);
  auto again = w.api.call(w.doc, "POST", "/patients/p-1/prescriptions/0/fulfill", medication);
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(again.body.at("revertReason"), "AlreadyFulfilled");
  auto list = w.api.call(w.patient, "GET", "/patients/p-1/prescriptions");
  EXPECT_EQ(list.body.at("prescriptions")[0].at("status"), "Fulfilled");

  auto validate = w.api.call(w.admin, "GET", "/chain/validate");
  EXPECT_EQ(validate.body.at("valid"), Json(true)) << validate.body.dump();
}

TEST(Api, ErrorMapping) {
  World w;
  auto unauth = w.api.call("nope", "GET", "/me");
  EXPECT_EQ(unauth.status, 401);
  EXPECT_EQ(unauth.body.at("error"), "Unauthenticated");
  EXPECT_TRUE(unauth.body.at("txId").is_null());

  EXPECT_EQ(w.api.call(w.doc, "POST", "/admin/patients", onboardBody("p-2")).status, 403);
  EXPECT_EQ(w.api.call(w.admin, "POST", "/admin/patients", onboardBody("p-1")).status, 409);
  EXPECT_EQ(w.api.call(w.admin, "POST", "/admin/providers", Json{{"providerId", "dr-a"}}).status, 409);
  EXPECT_EQ(w.api.call(w.admin, "GET", "/nowhere").status, 404);
  EXPECT_EQ(w.api.call(w.admin, "GET", "/chain/blocks/999").status, 404);
  EXPECT_EQ(w.api.call(w.admin, "GET", "/chain/blocks/abc").status, 400);
  EXPECT_EQ(w.api.call(w.admin, "POST", "/admin/mine").status, 409);  // empty mempool

  auto req = parseTarget("POST", "/patients/p-1/records");
  req.authorization = w.doc;
  req.body = "{not json";
  EXPECT_EQ(w.api.router.handle(req).status, 400);

  auto bad = observation("obs-x", 1);
  bad["attributes"].erase("code");
  auto schema = w.api.call(w.patient, "POST", "/patients/p-1/records", bad);
  EXPECT_EQ(schema.status, 400);
  EXPECT_EQ(schema.body.at("error"), "SchemaViolation");

  auto wrongSubject = observation("obs-y", 1);
  wrongSubject["subjectPatientId"] = "p-2";
  EXPECT_EQ(w.api.call(w.patient, "POST", "/patients/p-1/records", wrongSubject).status, 400);

  // Revert carries the on-chain reason and tx id.
  auto denied = w.api.call(w.otherDoc, "POST", "/patients/p-1/records", observation("obs-2", 5));
  EXPECT_EQ(denied.status, 403);
  EXPECT_EQ(denied.body.at("revertReason"), "Unauthorized");
  EXPECT_TRUE(denied.body.at("txId").is_string());

  EXPECT_EQ(w.api.call(w.patient, "POST", "/patients/p-1/permissions", Json{{"provider", "dr-a"}, {"action", "x"}}).status,
            400);
  EXPECT_EQ(
      w.api.call(w.patient, "POST", "/patients/p-1/prescriptions/7/fulfill", observation("o", 1)).status, 403);
  auto unknownRx = w.api.call(w.doc, "POST", "/patients/p-1/prescriptions/7/fulfill",
                              Json{{"resourceType", "MedicationRequest"}, {"id", "m"}, {"attributes", {{"medicationCode", "X"}}}});
  EXPECT_EQ(unknownRx.status, 403);  // not granted, checked before the request id
  EXPECT_EQ(w.api.call(w.doc, "GET", "/patients/p-1/records").status, 403);
  EXPECT_EQ(w.api.call(w.doc, "DELETE", "/providers/subscriptions/sub-77").status, 404);
  EXPECT_EQ(w.api.call(w.doc, "POST", "/providers/subscriptions", Json::object()).status, 400);
}

TEST(Api, FailedWriteLeavesNoOrphanObject) {
  World w;
  auto before = w.service.records().objectCount();
  auto r = w.api.call(w.otherDoc, "POST", "/patients/p-1/records", observation("obs-orphan", 9));
  ASSERT_EQ(r.status, 403);
  EXPECT_EQ(w.service.records().objectCount(), before);
  auto schema = w.api.call(w.patient, "POST", "/patients/p-1/records", Json{{"resourceType", "Observation"}});
  ASSERT_EQ(schema.status, 400);
  EXPECT_EQ(w.service.records().objectCount(), before);
}

TEST(Api, TransactionsAreSignedByTheCallersIdentity) {
  World w;
  w.api.call(w.patient, "POST", "/patients/p-1/permissions", Json{{"provider", "dr-a"}, {"action", "grant"}});
  auto write = w.api.call(w.doc, "POST", "/patients/p-1/records", observation("obs-1", 70));
  ASSERT_EQ(write.status, 201);
  auto docId = w.service.identities().byKey(w.doc);
  auto patientId = w.service.identities().byKey(w.patient);
  const auto* tx = w.findTx(Digest::fromHex(write.body.at("receipt").at("txId").get<std::string>()));
  ASSERT_NE(tx, nullptr);
  EXPECT_EQ(tx->sender, docId->address);

  auto rx = w.api.call(w.patient, "POST", "/patients/p-1/prescriptions", Json{{"medicationCode", "RX"}});
  tx = w.findTx(Digest::fromHex(rx.body.at("txId").get<std::string>()));
  ASSERT_NE(tx, nullptr);
  EXPECT_EQ(tx->sender, patientId->address);
  EXPECT_EQ(patientId->address, runtime::eoaAddress("patient:p-1"));

  // Every non-genesis transaction comes from an identity the service issued.
  auto& chain = w.service.chain();
  for (std::uint64_t h = 1; h < chain.length(); ++h)
    for (const auto& t : chain.block(h).transactions)
      EXPECT_TRUE(w.service.identities().byAddress(t.sender).has_value()) << t.sender.hex();
}

TEST(Api, SubscriptionsAndNotifications) {
  World w;
  auto sub = w.api.call(w.doc, "POST", "/providers/subscriptions", Json{{"patientId", "p-1"}});
  ASSERT_EQ(sub.status, 201) << sub.body.dump();
  auto sid = sub.body.at("subscriptionId").get<std::string>();
  EXPECT_EQ(w.api.call(w.otherDoc, "DELETE", "/providers/subscriptions/" + sid).status, 403);

  w.api.call(w.patient, "POST", "/patients/p-1/permissions", Json{{"provider", "dr-a"}, {"action", "grant"}});
  w.api.call(w.patient, "POST", "/patients/p-1/prescriptions", Json{{"medicationCode", "RX"}});
  auto feed = w.api.call(w.doc, "GET", "/providers/notifications?after=-1");
  ASSERT_EQ(feed.status, 200);
  const auto& items = feed.body.at("notifications");
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].at("event").at("topic"), "AccessGranted");
  EXPECT_EQ(items[1].at("event").at("topic"), "PrescriptionRequested");
  EXPECT_EQ(feed.body.at("lastSeq"), Json(1));
  EXPECT_TRUE(w.api.call(w.doc, "GET", "/providers/notifications?after=1").body.at("notifications").empty());
  EXPECT_TRUE(w.api.call(w.otherDoc, "GET", "/providers/notifications").body.at("notifications").empty());
  EXPECT_EQ(w.api.call(w.patient, "GET", "/providers/notifications").status, 403);

  EXPECT_EQ(w.api.call(w.doc, "DELETE", "/providers/subscriptions/" + sid).status, 200);
  w.api.call(w.patient, "POST", "/patients/p-1/prescriptions", Json{{"medicationCode", "RX2"}});
  EXPECT_EQ(w.api.call(w.doc, "GET", "/providers/notifications?after=1").body.at("notifications").size(), 0u);
}

TEST(Api, ManualMiningReturnsPending) {
  World w(memoryConfig(0));
  auto grant = w.api.call(w.patient, "POST", "/patients/p-1/permissions", Json{{"provider", "dr-a"}, {"action", "grant"}});
  ASSERT_EQ(grant.status, 202) << grant.body.dump();
  EXPECT_EQ(grant.body.at("pending"), Json(true));
  auto txId = grant.body.at("txId").get<std::string>();
  EXPECT_EQ(w.api.call(w.admin, "GET", "/chain/receipts/" + txId).status, 404);
  auto mined = w.api.call(w.admin, "POST", "/admin/mine");
  ASSERT_EQ(mined.status, 200);
  auto receipt = w.api.call(w.admin, "GET", "/chain/receipts/" + txId);
  ASSERT_EQ(receipt.status, 200);
  EXPECT_EQ(receipt.body.at("status"), "success");
  EXPECT_EQ(w.api.call(w.patient, "POST", "/admin/mine").status, 403);
}

TEST(Api, UnknownPatientReadsEmptyForProviders) {
  World w;
  auto r = w.api.call(w.doc, "GET", "/patients/p-404/records");
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_TRUE(r.body.at("records").empty());
  EXPECT_EQ(w.api.call(w.patient, "GET", "/patients/p-404/records").status, 403);
}

TEST(Service, StatePersistsAcrossRestart) {
  TempDir dir("dash-service");
  auto config = memoryConfig();
  config.dataDir = dir.path.string();
  std::string patientKey, recordHash;
  {
    World w(config);
    patientKey = w.patient;
    auto write = w.api.call(w.patient, "POST", "/patients/p-1/records", observation("obs-1", 1));
    ASSERT_EQ(write.status, 201);
    recordHash = write.body.at("recordHash");
  }
  DashService service(config);
  Api api{service};
  auto read = api.call(patientKey, "GET", "/patients/p-1/records");
  ASSERT_EQ(read.status, 200) << read.body.dump();
  EXPECT_EQ(read.body.at("records").back().at("entry").at("recordHash"), recordHash);
  EXPECT_TRUE(service.chain().validate().valid);
  EXPECT_EQ(service.dispatcher().cursor(), static_cast<std::int64_t>(service.chain().length() - 1));
}

TEST(Config, ParsingRules) {
  auto c = ServiceConfig::fromJson(Json{{"listen", {{"host", "0.0.0.0"}, {"port", 9000}}},
                                        {"difficulty", 3},
                                        {"autoMineThreshold", 0},
                                        {"clock", {{"mode", "fixed"}, {"start", 5}, {"step", 2}}}});
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.chain.difficulty, 3u);
  EXPECT_EQ(c.autoMineThreshold, 0u);
  auto clock = c.clock.make();
  EXPECT_EQ(clock->now(), 5u);
  EXPECT_EQ(clock->now(), 7u);
  EXPECT_THROW(ServiceConfig::fromJson(Json{{"difficulty", 3}, {"dificulty", 4}}), Error);
  EXPECT_THROW(ServiceConfig::fromJson(Json{{"recordBackend", "s3"}}), Error);
  EXPECT_THROW(ServiceConfig::fromJson(Json{{"clock", {{"mode", "lunar"}}}}), Error);

  TempDir dir("dash-config");
  std::filesystem::create_directories(dir.path);
  std::ofstream(dir.path / "node.json") << R"({"dataDir": "state"})";
  auto loaded = ServiceConfig::load(dir.path / "node.json");
  EXPECT_EQ(std::filesystem::path(loaded.dataDir), dir.path / "state");
}

TEST(Identity, KeysAreDerivedDeterministically) {
  EXPECT_EQ(deriveApiKey("k", "patient:p"), deriveApiKey("k", "patient:p"));
  EXPECT_NE(deriveApiKey("k", "patient:p"), deriveApiKey("k2", "patient:p"));
  EXPECT_EQ(deriveApiKey("k", "x").size(), 32u);
  IdentityStore store;
  Identity id;
  id.apiKey = "a";
  id.eoaLabel = "l";
  store.add(id);
  EXPECT_THROW(store.add(id), Error);
}

TEST(Scenario, ReferenceScenarioMeetsEveryExpectation) {
  DashService service(memoryConfig());
  std::ifstream in(std::string(DASH_TEST_DATA) + "/scenario.jsonl");
  ASSERT_TRUE(in);
  std::ostringstream out;
  auto summary = runScenario(service, in, out);
  EXPECT_EQ(summary.steps, 19u);
  EXPECT_EQ(summary.failures, 0u) << out.str();
}

TEST(Http, ServesHealthAndAuthenticatedRoutes) {
  DashService service(memoryConfig());
  HttpServer server(service);
  int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { server.run(); });
  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(Json::parse(health->body).at("status"), "ok");
  EXPECT_EQ(client.Get("/me")->status, 401);
  httplib::Headers auth{{"Authorization", "Bearer " + service.config().adminKey}};
  auto me = client.Get("/me", auth);
  ASSERT_TRUE(me);
  EXPECT_EQ(Json::parse(me->body).at("role"), "admin");
  auto created = client.Post("/admin/providers", auth, R"({"providerId":"dr-h","name":"H"})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  server.stop();
  t.join();
}
