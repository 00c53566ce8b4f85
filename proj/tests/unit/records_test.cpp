#include <gtest/gtest.h>

#include <fstream>

#include "dash/error.hpp"
#include "dash/records/record_store.hpp"
#include "temp_dir.hpp"

using namespace dash;
using namespace dash::records;
using dash::testing::TempDir;

namespace {

Json observation(const std::string& id = "obs-1") {
  return Json{{"resourceType", "Observation"},
              {"id", id},
              {"subjectPatientId", "p-1"},
              {"attributes", {{"code", "8867-4"}, {"value", 72}}},
              {"authoredAt", 1700000000}};
}

std::string violation(const Json& j) {
  try {
    Resource::fromJson(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
    return e.detail();
  }
  return "";
}

RecordStore memoryStore(std::shared_ptr<AuditLog> audit = nullptr) {
  if (!audit) audit = std::make_shared<AuditLog>(std::make_shared<SteppingClock>(10, 1));
  return RecordStore(std::make_unique<MemoryBackend>(), audit);
}

}  // namespace

TEST(Resource, RoundTripsThroughJson) {
  auto r = Resource::fromJson(observation());
  EXPECT_EQ(r.resourceType, ResourceType::Observation);
  EXPECT_EQ(std::get<std::int64_t>(r.attributes.at("value")), 72);
  EXPECT_EQ(Resource::fromJson(r.toJson()), r);
  EXPECT_EQ(r.canonical(), canonicalDump(observation()));
}

TEST(Resource, PatientDefaultsSubjectToId) {
  auto r = Resource::fromJson(Json{{"resourceType", "Patient"},
                                   {"id", "p-1"},
                                   {"attributes", {{"name", "Ann"}, {"birthDate", "1990-01-01"}}},
                                   {"authoredAt", 0}});
  EXPECT_EQ(r.subjectPatientId, "p-1");
  auto other = r.toJson();
  other["subjectPatientId"] = "p-2";
  EXPECT_NE(violation(other).find("must equal id"), std::string::npos);
}

TEST(Resource, SchemaErrorsAreReportedTogether) {
  Json j = observation();
  j["attributes"].erase("code");
  j["extra"] = 1;
  j["authoredAt"] = -1;
  auto detail = violation(j);
  EXPECT_NE(detail.find("attributes.code: required"), std::string::npos);
  EXPECT_NE(detail.find("extra: unexpected field"), std::string::npos);
  EXPECT_NE(detail.find("authoredAt"), std::string::npos);
}

TEST(Resource, RejectsBadShapes) {
  EXPECT_NE(violation(Json::array()), "");
  EXPECT_NE(violation(Json{{"resourceType", "Invoice"}}).find("unknown"), std::string::npos);
  Json floaty = observation();
  floaty["attributes"]["value"] = 1.5;
  EXPECT_NE(violation(floaty).find("attributes.value"), std::string::npos);
  Json numericCode = observation();
  numericCode["attributes"]["code"] = 5;
  EXPECT_NE(violation(numericCode).find("must be a string"), std::string::npos);
  Json empty = observation();
  empty["attributes"]["code"] = "";
  EXPECT_NE(violation(empty).find("non-empty"), std::string::npos);
  Json noSubject = observation();
  noSubject.erase("subjectPatientId");
  EXPECT_NE(violation(noSubject).find("subjectPatientId"), std::string::npos);
}

TEST(StoragePointer, ParseAndRender) {
  auto p = StoragePointer::parse("file:abc");
  EXPECT_EQ(p.backend, BackendKind::File);
  EXPECT_EQ(p.locator, "abc");
  EXPECT_EQ(p.str(), "file:abc");
  for (const char* bad : {"abc", "disk:abc", "memory:", ""}) {
    EXPECT_THROW(StoragePointer::parse(bad), Error) << bad;
  }
}

TEST(RecordStore, PutIsContentAddressed) {
  auto store = memoryStore();
  auto r = Resource::fromJson(observation());
  auto a = store.put(r);
  auto b = store.put(r);
  EXPECT_TRUE(a.created);
  EXPECT_FALSE(b.created);
  EXPECT_EQ(a.recordHash, r.digest());
  EXPECT_EQ(a.pointer.locator, r.digest().hex());
  EXPECT_EQ(store.objectCount(), 1u);
  EXPECT_TRUE(store.remove(a.pointer));
  EXPECT_FALSE(store.remove(a.pointer));
  EXPECT_EQ(store.objectCount(), 0u);
}

TEST(RecordStore, PutValidates) {
  auto store = memoryStore();
  Resource bad;
  bad.resourceType = ResourceType::Coverage;
  bad.id = "c";
  bad.subjectPatientId = "p";
  try {
    store.put(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
  }
  EXPECT_EQ(store.objectCount(), 0u);
}

TEST(RecordProxy, LazyVerifiedCachedAndAudited) {
  auto audit = std::make_shared<AuditLog>(std::make_shared<SteppingClock>(10, 1));
  auto store = memoryStore(audit);
  auto put = store.put(Resource::fromJson(observation()));
  auto proxy = store.makeProxy(put.pointer, put.recordHash);
  EXPECT_EQ(store.active().reads(), 0u);
  EXPECT_FALSE(proxy.cached());

  auto first = store.resolve(proxy, "dr-a");
  auto second = store.resolve(proxy, "dr-b");
  EXPECT_EQ(first, second);
  EXPECT_TRUE(proxy.cached());
  EXPECT_EQ(store.active().reads(), 1u);
  ASSERT_EQ(proxy.audit().size(), 2u);
  EXPECT_EQ(proxy.audit()[0].accessorId, "dr-a");
  EXPECT_EQ(proxy.audit()[1].accessorId, "dr-b");
  EXPECT_LT(proxy.audit()[0].timestamp, proxy.audit()[1].timestamp);
  auto entries = audit->entries();
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[1].recordHash, put.recordHash);
}

TEST(RecordProxy, DetectsTamperedBytes) {
  auto backend = std::make_unique<MemoryBackend>();
  auto* raw = backend.get();
  RecordStore store(std::move(backend), std::make_shared<AuditLog>(std::make_shared<SteppingClock>(1)));
  auto put = store.put(Resource::fromJson(observation()));
  auto text = canonicalDump(observation());
  text.replace(text.find("72"), 2, "73");
  raw->corrupt(put.pointer.locator, text);
  auto proxy = store.makeProxy(put.pointer, put.recordHash);
  try {
    proxy.resolve("dr-a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IntegrityMismatch);
  }
  EXPECT_EQ(store.auditLog().size(), 0u);
}

TEST(RecordProxy, MissingObjectAndBackend) {
  auto store = memoryStore();
  auto put = store.put(Resource::fromJson(observation()));
  store.remove(put.pointer);
  auto gone = store.makeProxy(put.pointer, put.recordHash);
  EXPECT_THROW(gone.resolve("x"), Error);
  auto elsewhere = store.makeProxy(StoragePointer{BackendKind::File, put.pointer.locator}, put.recordHash);
  try {
    elsewhere.resolve("x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFound);
  }
}

TEST(FileBackend, PersistsAcrossInstancesAndVerifies) {
  TempDir dir("dash-records");
  auto auditFile = dir.path / "audit.jsonl";
  Digest hash;
  StoragePointer pointer;
  {
    RecordStore store(std::make_unique<FileBackend>(dir.path / "objects"),
                      std::make_shared<AuditLog>(std::make_shared<SteppingClock>(5, 1), auditFile));
    auto put = store.put(Resource::fromJson(observation()));
    hash = put.recordHash;
    pointer = put.pointer;
    EXPECT_EQ(pointer.backend, BackendKind::File);
    auto proxy = store.makeProxy(pointer, hash);
    proxy.resolve("dr-a");
  }
  FileBackend backend(dir.path / "objects");
  EXPECT_EQ(backend.count(), 1u);
  EXPECT_EQ(sha256(*backend.get(pointer.locator)), hash);
  EXPECT_FALSE(backend.get("../etc/passwd").has_value());
  EXPECT_FALSE(backend.erase("not-hex"));

  std::ifstream in(auditFile);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(canonicalParse(line).at("accessorId"), "dr-a");

  {
    std::ofstream out(backend.pathOf(pointer.locator), std::ios::trunc);
    out << "{}";
  }
  RecordStore reopened(std::make_unique<FileBackend>(dir.path / "objects"),
                       std::make_shared<AuditLog>(std::make_shared<SteppingClock>(1)));
  auto proxy = reopened.makeProxy(pointer, hash);
  EXPECT_THROW(proxy.resolve("dr-a"), Error);
}

TEST(FileBackend, UnwritableDirectoryIsBackendUnavailable) {
  TempDir dir("dash-records");
  std::filesystem::create_directories(dir.path);
  std::ofstream(dir.path / "blocker") << "x";
  try {
    FileBackend b(dir.path / "blocker" / "sub");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BackendUnavailable);
  }
}
