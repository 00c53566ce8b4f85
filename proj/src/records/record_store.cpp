#include "dash/records/record_store.hpp"

#include "dash/error.hpp"
#include "dash/ledger/chain_store.hpp"

namespace dash::records {

AuditLog::AuditLog(std::shared_ptr<Clock> clock, std::optional<std::filesystem::path> file)
    : clock_(std::move(clock)), file_(std::move(file)) {}

AuditEntry AuditLog::append(const std::string& accessorId, const Digest& recordHash) {
  std::lock_guard lk(mu_);
  AuditEntry entry{accessorId, recordHash, clock_->now()};
  if (file_) {
    ledger::appendLine(*file_, canonicalDump(Json{{"accessorId", entry.accessorId},
                                                  {"recordHash", entry.recordHash.hex()},
                                                  {"timestamp", entry.timestamp}}));
  }
  entries_.push_back(entry);
  return entry;
}

std::vector<AuditEntry> AuditLog::entries() const {
  std::lock_guard lk(mu_);
  return entries_;
}

std::size_t AuditLog::size() const {
  std::lock_guard lk(mu_);
  return entries_.size();
}

const Resource& RecordProxy::resolve(const std::string& accessorId) {
  if (!cached_) {
    if (!backend_) fail(ErrorCode::NotFound, "no backend configured for " + pointer_.str());
    auto bytes = backend_->get(pointer_.locator);
    if (!bytes) fail(ErrorCode::NotFound, pointer_.str());
    if (sha256(*bytes) != expectedHash_)
      fail(ErrorCode::IntegrityMismatch, "stored bytes for " + pointer_.str() + " do not hash to " + expectedHash_.hex());
    try {
      cached_ = Resource::fromJson(canonicalParse(*bytes));
    } catch (const Error& e) {
      fail(ErrorCode::IntegrityMismatch, e.what());
    }
  }
  std::uint64_t now = 0;
  if (audit_) now = audit_->append(accessorId, expectedHash_).timestamp;
  accesses_.push_back({accessorId, now});
  return *cached_;
}

RecordStore::RecordStore(std::unique_ptr<Backend> active, std::shared_ptr<AuditLog> audit)
    : activeKind_(active->kind()), audit_(std::move(audit)) {
  backends_.emplace(activeKind_, std::move(active));
}

void RecordStore::addBackend(std::unique_ptr<Backend> backend) {
  auto kind = backend->kind();
  backends_.emplace(kind, std::move(backend));
}

Backend* RecordStore::backend(BackendKind kind) {
  auto it = backends_.find(kind);
  return it == backends_.end() ? nullptr : it->second.get();
}

PutResult RecordStore::put(const Resource& resource) {
  validateResource(resource);
  auto bytes = resource.canonical();
  auto digest = sha256(bytes);
  auto [locator, created] = active().put(digest, bytes);
  return PutResult{digest, StoragePointer{activeKind_, locator}, created};
}

bool RecordStore::remove(const StoragePointer& pointer) {
  auto* b = backend(pointer.backend);
  return b && b->erase(pointer.locator);
}

RecordProxy RecordStore::makeProxy(const StoragePointer& pointer, const Digest& expectedHash) {
  return RecordProxy(pointer, expectedHash, backend(pointer.backend), audit_.get());
}

std::size_t RecordStore::objectCount() const {
  std::size_t n = 0;
  for (const auto& [_, b] : backends_) n += b->count();
  return n;
}

}  // namespace dash::records
