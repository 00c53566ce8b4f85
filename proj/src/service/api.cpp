#include "dash/service/api.hpp"

#include <charconv>
#include <iostream>
#include <vector>

#include "dash/json_util.hpp"

namespace dash::service {

namespace {

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    auto j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    out.push_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string bearer(const std::string& header) {
  constexpr std::string_view prefix = "Bearer ";
  if (header.starts_with(prefix)) return header.substr(prefix.size());
  return header;
}

Json parseBody(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::parse_error&) {
    throw ApiError(400, "InvalidArgument", "request body is not valid JSON");
  }
}

std::uint64_t parseU64(const std::string& s, const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ApiError(400, "InvalidArgument", std::string(what) + " must be a non-negative integer");
  return v;
}

std::int64_t parseI64(const std::string& s, const char* what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ApiError(400, "InvalidArgument", std::string(what) + " must be an integer");
  return v;
}

std::string bodyStr(const Json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body.at(key).is_string())
    throw ApiError(400, "InvalidArgument", std::string("body requires string field '") + key + "'");
  return body.at(key).get<std::string>();
}

Json txOutcomeJson(const TxOutcome& out) {
  Json j{{"txId", out.txId.hex()}};
  j["receipt"] = out.receipt ? out.receipt->toJson() : Json(nullptr);
  j["pending"] = !out.receipt.has_value();
  return j;
}

Json writeJson(const WriteResult& w) {
  return Json{{"receipt", w.receipt.toJson()},
              {"entryIndex", w.entryIndex},
              {"recordHash", w.recordHash.hex()},
              {"pointer", w.pointer.str()},
              {"accountAddress", w.account.hex()}};
}

ApiResponse notFound() { return {404, ApiError(404, "NotFound", "no such endpoint").toJson()}; }

}  // namespace

ApiRequest parseTarget(std::string method, const std::string& target) {
  ApiRequest req;
  req.method = std::move(method);
  auto q = target.find('?');
  req.path = target.substr(0, q);
  if (q == std::string::npos) return req;
  std::string query = target.substr(q + 1);
  std::size_t i = 0;
  while (i <= query.size()) {
    auto amp = query.find('&', i);
    if (amp == std::string::npos) amp = query.size();
    auto pair = query.substr(i, amp - i);
    if (!pair.empty()) {
      auto eq = pair.find('=');
      if (eq == std::string::npos)
        req.query[pair] = "";
      else
        req.query[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    i = amp + 1;
  }
  return req;
}

ApiResponse ApiRouter::handle(const ApiRequest& req) {
  try {
    return route(req);
  } catch (const ApiError& e) {
    return {e.status(), e.toJson()};
  } catch (const Error& e) {
    auto api = ApiError::fromError(e);
    return {api.status(), api.toJson()};
  } catch (const std::exception& e) {
    std::cerr << req.method << " " << req.path << ": " << e.what() << "\n";
    return {500, ApiError(500, "Internal", e.what()).toJson()};
  }
}

ApiResponse ApiRouter::route(const ApiRequest& req) {
  const auto seg = segments(req.path);
  const auto& m = req.method;
  const auto n = seg.size();

  if (m == "GET" && n == 1 && seg[0] == "health") return {200, Json{{"status", "ok"}, {"height", service_.chain().length() - 1}}};

  Identity caller = service_.authenticate(bearer(req.authorization));
  Json body = (m == "POST" || m == "DELETE") ? parseBody(req.body) : Json::object();

  if (m == "GET" && n == 1 && seg[0] == "me") return {200, caller.publicJson()};

  if (n >= 2 && seg[0] == "admin") {
    if (m == "POST" && n == 2 && seg[1] == "patients") {
      OnboardRequest r;
      r.patientId = bodyStr(body, "patientId");
      r.demographics = body.value("demographics", Json::object());
      r.plan = body.value("plan", Json::object());
      if (body.contains("extrinsic")) r.extrinsic = body.at("extrinsic");
      auto res = service_.onboardPatient(caller, r);
      Json steps = Json::array();
      for (const auto& [step, receipt] : res.receipts) steps.push_back(Json{{"step", step}, {"receipt", receipt.toJson()}});
      Json out{{"patientId", r.patientId},
               {"accountAddress", res.account.hex()},
               {"address", res.identity.address.hex()},
               {"apiKey", res.identity.apiKey},
               {"receipts", steps}};
      out["planRef"] = res.planRef ? Json(res.planRef->hex()) : Json(nullptr);
      return {201, out};
    }
    if (m == "POST" && n == 2 && seg[1] == "providers") {
      auto name = body.contains("name") ? bodyStr(body, "name") : std::string();
      auto id = service_.onboardProvider(caller, bodyStr(body, "providerId"), name);
      return {201, id.toJson()};
    }
    if (m == "POST" && n == 2 && seg[1] == "mine") {
      std::optional<std::size_t> maxTxs;
      if (body.contains("maxTxs")) maxTxs = json::u64(body, "maxTxs", ErrorCode::InvalidArgument);
      auto block = service_.mine(caller, maxTxs);
      Json receipts = Json::array();
      for (const auto& r : service_.chain().blockReceipts(block.header.height)) receipts.push_back(r.toJson());
      return {200, Json{{"block", block.toJson()}, {"receipts", receipts}}};
    }
    return notFound();
  }

  if (n >= 3 && seg[0] == "patients") {
    const auto& pid = seg[1];
    if (n == 3 && seg[2] == "records") {
      if (m == "GET") {
        auto views = service_.readRecords(caller, pid);
        Json records = Json::array();
        for (const auto& v : views)
          records.push_back(Json{{"entryIndex", v.entryIndex}, {"entry", v.entry}, {"resource", v.resource.toJson()}});
        auto account = service_.accountOf(pid);
        return {200, Json{{"patientId", pid},
                          {"accountAddress", account ? Json(account->hex()) : Json(nullptr)},
                          {"records", records}}};
      }
      if (m == "POST") return {201, writeJson(service_.writeRecord(caller, pid, body))};
    }
    if (n == 3 && seg[2] == "permissions") {
      if (m == "POST") {
        auto out = service_.setPermission(caller, pid, bodyStr(body, "provider"), bodyStr(body, "action"));
        return {out.receipt ? 200 : 202, txOutcomeJson(out)};
      }
      if (m == "GET") return {200, Json{{"providers", service_.providers(caller, pid)}}};
    }
    if (n == 3 && seg[2] == "prescriptions") {
      if (m == "POST") {
        auto out = service_.requestPrescription(caller, pid, bodyStr(body, "medicationCode"));
        Json j = txOutcomeJson(out);
        j["requestId"] = out.receipt ? *out.receipt->returnValue : Json(nullptr);
        return {out.receipt ? 201 : 202, j};
      }
      if (m == "GET") return {200, Json{{"prescriptions", service_.listPrescriptions(caller, pid)}}};
    }
    if (n == 5 && seg[2] == "prescriptions" && seg[4] == "fulfill" && m == "POST") {
      Json resource = body.contains("resource") ? body.at("resource") : body;
      auto w = service_.fulfillPrescription(caller, pid, parseU64(seg[3], "request id"), resource);
      return {201, writeJson(w)};
    }
    return notFound();
  }

  if (n >= 2 && seg[0] == "providers") {
    if (seg[1] == "subscriptions") {
      if (m == "POST" && n == 2) {
        auto [id, sub] = service_.subscribe(caller, body);
        return {201, Json{{"subscriptionId", id}, {"subscription", sub.toJson()}}};
      }
      if (m == "DELETE" && n == 3) {
        service_.unsubscribe(caller, seg[2]);
        return {200, Json{{"subscriptionId", seg[2]}, {"removed", true}}};
      }
      if (m == "GET" && n == 2) {
        Json subs = Json::array();
        for (const auto& s : service_.dispatcher().subscriptions())
          if (s.subscriberId == caller.eoaLabel) subs.push_back(s.toJson());
        return {200, Json{{"subscriptions", subs}}};
      }
    }
    if (m == "GET" && n == 2 && seg[1] == "notifications") {
      std::int64_t after = -1;
      if (auto it = req.query.find("after"); it != req.query.end()) after = parseI64(it->second, "after");
      std::chrono::milliseconds wait{0};
      if (auto it = req.query.find("wait"); it != req.query.end())
        wait = std::chrono::seconds(std::min<std::uint64_t>(parseU64(it->second, "wait"), 60));
      auto feed = service_.notifications(caller, after, wait);
      Json items = Json::array();
      for (const auto& nfy : feed) items.push_back(nfy.toJson());
      std::int64_t last = feed.empty() ? after : static_cast<std::int64_t>(feed.back().deliverySeq);
      return {200, Json{{"notifications", items}, {"lastSeq", last}}};
    }
    return notFound();
  }

  if (n >= 2 && seg[0] == "chain" && m == "GET") {
    auto& chain = service_.chain();
    if (n == 3 && seg[1] == "blocks") {
      auto h = parseU64(seg[2], "height");
      auto block = chain.block(h);
      Json receipts = Json::array();
      for (const auto& r : chain.blockReceipts(h)) receipts.push_back(r.toJson());
      return {200, Json{{"block", block.toJson()}, {"receipts", receipts}}};
    }
    if (n == 2 && seg[1] == "validate") return {200, chain.validate().toJson()};
    if (n == 3 && seg[1] == "receipts") {
      Digest id;
      if (!Digest::tryFromHex(seg[2], id)) throw ApiError(400, "InvalidArgument", "malformed transaction id");
      return {200, chain.receipt(id).toJson()};
    }
    if (n == 2 && seg[1] == "head")
      return {200, Json{{"height", chain.length() - 1}, {"hash", chain.block(chain.length() - 1).header.hash().hex()}}};
    return notFound();
  }

  return notFound();
}

}  // namespace dash::service
