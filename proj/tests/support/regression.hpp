#pragma once

// Behavioural regression over one PatientAccount, driven only through the
// client wrappers. Returns the list of failed checks (empty on success).

#include <string>
#include <vector>

#include "dash_harness.hpp"

namespace dash::testing {

struct AccountUnderTest {
  std::string patientId;
  Address owner;
  Address account;
};

inline std::vector<std::string> patientAccountRegression(DashHarness& h, const AccountUnderTest& a,
                                                         const Address& provider, const Address& stranger) {
  std::vector<std::string> failures;
  auto check = [&](bool cond, const std::string& what) {
    if (!cond) failures.push_back(a.patientId + ": " + what);
  };
  contracts::PatientAccountClient acct{a.account};

  auto info = h.view(a.owner, a.account, "info");
  check(info.at("patientId") == a.patientId, "info.patientId");
  check(info.at("owner") == a.owner.hex(), "info.owner");
  auto recordsBefore = info.at("recordCount").get<std::uint64_t>();

  check(h.run(stranger, acct.grantAccess(provider)).revertReason == "Unauthorized", "stranger cannot grant");
  check(h.run(a.owner, acct.grantAccess(provider)).ok(), "owner grants");
  auto providers = h.view(a.owner, a.account, "getProviders");
  check(providers.size() == 1 && providers[0] == provider.hex(), "provider listed");

  auto hash = sha256("record for " + a.patientId);
  auto appended = h.run(provider, acct.appendRecord(hash, "memory:" + hash.hex(), "Observation"));
  check(appended.ok(), "granted provider appends");
  check(appended.ok() && appended.returnValue == Json(recordsBefore), "entry index");
  check(h.run(stranger, acct.appendRecord(hash, "memory:x", "Observation")).revertReason == "Unauthorized",
        "stranger cannot append");

  auto list = h.view(provider, a.account, "listRecords");
  check(list.size() == recordsBefore + 1 && list.back().at("recordHash") == hash.hex(), "list shows entry");
  check(!h.chain->staticCall(stranger, a.account, "listRecords", Json::object()).ok, "stranger cannot list");

  auto rx = h.run(a.owner, acct.requestPrescription("RX-1"));
  check(rx.ok(), "owner requests prescription");
  auto rid = rx.ok() ? rx.returnValue->get<std::uint64_t>() : 0;
  check(h.run(stranger, acct.fulfillPrescription(rid, hash, "memory:y")).revertReason == "Unauthorized",
        "stranger cannot fulfill");
  auto done = h.run(provider, acct.fulfillPrescription(rid, sha256("med"), "memory:med"));
  check(done.ok(), "provider fulfills");
  check(h.run(provider, acct.fulfillPrescription(rid, sha256("med"), "memory:med")).revertReason == "AlreadyFulfilled",
        "second fulfill rejected");
  auto rxs = h.view(a.owner, a.account, "listPrescriptions");
  check(!rxs.empty() && rxs.back().at("status") == "Fulfilled", "prescription status");

  Json plan{{"payerName", "Regression Payer"}, {"planCode", "R-1"}, {"coverageTier", "basic"}};
  auto ref = h.run(h.admin, h.planStore().intern(plan));
  check(ref.ok(), "intern plan");
  if (ref.ok()) {
    auto planRef = Digest::fromHex(ref.returnValue->get<std::string>());
    check(h.run(a.owner, acct.setInsurancePlan(planRef, Json{{"memberNumber", "m"}, {"groupCode", "g"}})).ok(),
          "set plan");
    auto got = h.view(a.owner, a.account, "getInsurancePlan");
    check(got.at("planRef") == planRef.hex(), "plan reference stored");
  }

  check(h.run(a.owner, acct.revokeAccess(provider)).ok(), "owner revokes");
  check(h.run(provider, acct.appendRecord(hash, "memory:z", "Observation")).revertReason == "Unauthorized",
        "revoked provider cannot append");
  return failures;
}

}  // namespace dash::testing
