#include <limits>

#include "dash/json_util.hpp"
#include "dash/ledger/block.hpp"
#include "dash/ledger/event.hpp"
#include "dash/ledger/receipt.hpp"
#include "dash/ledger/transaction.hpp"

namespace dash::ledger {

Json Event::toJson() const {
  return Json{{"emitter", emitter.hex()}, {"topic", topic}, {"payload", payload}, {"sequence", sequence}};
}

Event Event::fromJson(const Json& j) {
  Event e;
  e.emitter = json::address(j, "emitter");
  e.topic = json::str(j, "topic");
  e.payload = json::at(j, "payload");
  e.sequence = static_cast<std::uint32_t>(json::u64(j, "sequence"));
  return e;
}

Json payloadToJson(const Payload& p) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CreateContract>) {
          return Json{{"type", "create"}, {"typeId", v.typeId}, {"version", v.version}, {"ctorArgs", v.ctorArgs}};
        } else if constexpr (std::is_same_v<T, CallContract>) {
          return Json{{"type", "call"}, {"target", v.target.hex()}, {"function", v.function}, {"args", v.args}};
        } else {
          return Json{{"type", "transfer"}, {"target", v.target.hex()}, {"amount", v.amount}};
        }
      },
      p);
}

Payload payloadFromJson(const Json& j) {
  constexpr auto kCode = ErrorCode::MalformedTransaction;
  auto type = json::str(j, "type", kCode);
  if (type == "create") {
    auto version = json::u64(j, "version", kCode);
    if (version > std::numeric_limits<std::uint32_t>::max()) fail(kCode, "version out of range");
    return CreateContract{json::str(j, "typeId", kCode), static_cast<std::uint32_t>(version),
                          json::at(j, "ctorArgs", kCode)};
  }
  if (type == "call")
    return CallContract{json::address(j, "target", kCode), json::str(j, "function", kCode), json::at(j, "args", kCode)};
  if (type == "transfer") return Transfer{json::address(j, "target", kCode), json::u64(j, "amount", kCode)};
  fail(kCode, "unknown payload type '" + type + "'");
}

Json Transaction::body() const {
  return Json{{"sender", sender.hex()},
              {"senderNonce", senderNonce},
              {"payload", payloadToJson(payload)},
              {"gasLimit", gasLimit},
              {"timestamp", timestamp}};
}

Json Transaction::toJson() const {
  auto j = body();
  j["id"] = id.hex();
  return j;
}

Digest Transaction::computeId() const { return hashCanonical(body()); }

Transaction Transaction::make(const Address& sender, std::uint64_t nonce, Payload payload, std::uint64_t gasLimit,
                              std::uint64_t timestamp) {
  Transaction tx{Digest{}, sender, nonce, std::move(payload), gasLimit, timestamp};
  tx.id = tx.computeId();
  return tx;
}

Transaction Transaction::fromJson(const Json& j) {
  constexpr auto kCode = ErrorCode::MalformedTransaction;
  Transaction tx;
  tx.id = json::digest(j, "id", kCode);
  tx.sender = json::address(j, "sender", kCode);
  tx.senderNonce = json::u64(j, "senderNonce", kCode);
  tx.payload = payloadFromJson(json::at(j, "payload", kCode));
  tx.gasLimit = json::u64(j, "gasLimit", kCode);
  tx.timestamp = json::u64(j, "timestamp", kCode);
  if (j.size() != 6) fail(kCode, "unexpected fields in transaction");
  return tx;
}

Json Receipt::toJson() const {
  Json events_json = Json::array();
  for (const auto& e : events) events_json.push_back(e.toJson());
  Json j{{"txId", txId.hex()},
         {"status", ok() ? "success" : "reverted"},
         {"gasUsed", gasUsed},
         {"events", std::move(events_json)},
         {"blockHeight", blockHeight},
         {"indexInBlock", indexInBlock}};
  if (!ok()) j["reason"] = revertReason;
  if (returnValue) j["returnValue"] = *returnValue;
  return j;
}

Receipt Receipt::fromJson(const Json& j) {
  Receipt r;
  r.txId = json::digest(j, "txId");
  auto status = json::str(j, "status");
  if (status == "success") {
    r.status = TxStatus::Success;
  } else if (status == "reverted") {
    r.status = TxStatus::Reverted;
    r.revertReason = json::str(j, "reason");
  } else {
    fail(ErrorCode::Corrupt, "bad receipt status '" + status + "'");
  }
  r.gasUsed = json::u64(j, "gasUsed");
  if (auto it = j.find("returnValue"); it != j.end()) r.returnValue = *it;
  for (const auto& e : json::at(j, "events")) r.events.push_back(Event::fromJson(e));
  r.blockHeight = json::u64(j, "blockHeight");
  r.indexInBlock = static_cast<std::uint32_t>(json::u64(j, "indexInBlock"));
  return r;
}

Json BlockHeader::toJson() const {
  return Json{{"height", height},         {"prevHash", prevHash.hex()}, {"txRoot", txRoot.hex()},
              {"powNonce", powNonce},     {"difficulty", difficulty},   {"timestamp", timestamp}};
}

Json Block::toJson() const {
  auto j = header.toJson();
  j["hash"] = header.hash().hex();
  Json txs = Json::array();
  for (const auto& tx : transactions) txs.push_back(tx.toJson());
  j["transactions"] = std::move(txs);
  return j;
}

Block Block::fromJson(const Json& j) {
  Block b;
  b.header.height = json::u64(j, "height");
  b.header.prevHash = json::digest(j, "prevHash");
  b.header.txRoot = json::digest(j, "txRoot");
  b.header.powNonce = json::u64(j, "powNonce");
  auto difficulty = json::u64(j, "difficulty");
  if (difficulty > 256) fail(ErrorCode::Corrupt, "difficulty out of range");
  b.header.difficulty = static_cast<std::uint32_t>(difficulty);
  b.header.timestamp = json::u64(j, "timestamp");
  const auto& txs = json::at(j, "transactions");
  if (!txs.is_array()) fail(ErrorCode::Corrupt, "transactions must be an array");
  for (const auto& t : txs) {
    try {
      b.transactions.push_back(Transaction::fromJson(t));
    } catch (const Error& e) {
      fail(ErrorCode::Corrupt, e.what());
    }
  }
  if (j.size() != 8) fail(ErrorCode::Corrupt, "unexpected fields in block");
  if (json::digest(j, "hash") != b.header.hash()) fail(ErrorCode::Corrupt, "stored block hash does not match header");
  return b;
}

Digest computeTxRoot(std::span<const Digest> ids) {
  Bytes flat;
  flat.reserve(ids.size() * 32);
  for (const auto& id : ids) flat.insert(flat.end(), id.bytes.begin(), id.bytes.end());
  return sha256(flat);
}

Digest computeTxRoot(std::span<const Transaction> txs) {
  std::vector<Digest> ids;
  ids.reserve(txs.size());
  for (const auto& tx : txs) ids.push_back(tx.computeId());
  return computeTxRoot(ids);
}

std::uint64_t solvePow(BlockHeader& header) {
  // Canonical key order puts powNonce between height and prevHash, so the
  // header bytes split into a fixed prefix and suffix around the nonce digits.
  header.powNonce = 0;
  const std::string full = header.canonical();
  const std::string marker = "\"powNonce\":";
  const auto at = full.find(marker) + marker.size();
  const std::string prefix = full.substr(0, at);
  const std::string suffix = full.substr(full.find(',', at));

  std::string buf;
  for (std::uint64_t nonce = 0;; ++nonce) {
    buf.assign(prefix);
    buf.append(std::to_string(nonce));
    buf.append(suffix);
    if (leadingZeroBits(sha256(buf)) >= static_cast<int>(header.difficulty)) {
      header.powNonce = nonce;
      return nonce + 1;
    }
  }
}

}  // namespace dash::ledger
