#include "dash/service/scenario.hpp"

#include <istream>
#include <ostream>

#include "dash/json_util.hpp"

namespace dash::service {

namespace {

std::string resolveActor(DashService& service, const std::string& actor) {
  if (!actor.starts_with("@")) return actor;
  auto label = actor.substr(1);
  auto id = service.identities().byLabel(label);
  // Unknown labels pass through and fail authentication like any bad key.
  return id ? id->apiKey : actor;
}

}  // namespace

ScenarioSummary runScenario(DashService& service, std::istream& in, std::ostream& out) {
  ApiRouter router(service);
  ScenarioSummary summary;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json step;
    try {
      step = Json::parse(line);
    } catch (const Json::parse_error& e) {
      fail(ErrorCode::InvalidArgument, "scenario line " + std::to_string(lineNo) + ": " + e.what());
    }
    if (!step.is_object()) fail(ErrorCode::InvalidArgument, "scenario line " + std::to_string(lineNo) + " is not an object");

    auto req = parseTarget(json::str(step, "method", ErrorCode::InvalidArgument),
                           json::str(step, "path", ErrorCode::InvalidArgument));
    if (step.contains("actorKey")) req.authorization = resolveActor(service, json::str(step, "actorKey", ErrorCode::InvalidArgument));
    if (step.contains("body") && !step.at("body").is_null()) req.body = canonicalDump(step.at("body"));
    auto res = router.handle(req);

    Json record{{"step", step.value("step", Json(lineNo))}, {"method", req.method}, {"path", req.path},
                {"status", res.status}};
    const Json& b = res.body;
    if (b.contains("error")) {
      record["error"] = b.at("error");
      if (!b.at("revertReason").is_null()) record["revertReason"] = b.at("revertReason");
    }
    if (b.contains("receipt") && b.at("receipt").is_object()) {
      record["txId"] = b.at("receipt").at("txId");
      record["txStatus"] = b.at("receipt").at("status");
      record["gasUsed"] = b.at("receipt").at("gasUsed");
    } else if (b.contains("txId") && !b.at("txId").is_null()) {
      record["txId"] = b.at("txId");
    }
    if (step.contains("expect")) {
      auto expected = json::u64(step, "expect", ErrorCode::InvalidArgument);
      bool ok = expected == static_cast<std::uint64_t>(res.status);
      record["expectOk"] = ok;
      if (!ok) ++summary.failures;
    }
    out << canonicalDump(record) << "\n";
    ++summary.steps;
  }
  return summary;
}

}  // namespace dash::service
