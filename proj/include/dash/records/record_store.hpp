#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dash/records/audit.hpp"
#include "dash/records/backend.hpp"
#include "dash/records/resource.hpp"

namespace dash::records {

/// Lazy handle to an off-chain record. Nothing is read until resolve();
/// the first resolve verifies the digest and caches, every resolve audits.
class RecordProxy {
 public:
  struct Access {
    std::string accessorId;
    std::uint64_t timestamp = 0;
  };

  RecordProxy(StoragePointer pointer, Digest expectedHash, Backend* backend, AuditLog* audit)
      : pointer_(std::move(pointer)), expectedHash_(expectedHash), backend_(backend), audit_(audit) {}

  /// Throws NotFound or IntegrityMismatch.
  const Resource& resolve(const std::string& accessorId);

  const StoragePointer& pointer() const { return pointer_; }
  const Digest& expectedHash() const { return expectedHash_; }
  bool cached() const { return cached_.has_value(); }
  const std::vector<Access>& audit() const { return accesses_; }

  bool operator==(const RecordProxy& o) const { return pointer_ == o.pointer_ && expectedHash_ == o.expectedHash_; }

 private:
  StoragePointer pointer_;
  Digest expectedHash_;
  Backend* backend_;
  AuditLog* audit_;
  std::optional<Resource> cached_;
  std::vector<Access> accesses_;
};

struct PutResult {
  Digest recordHash;
  StoragePointer pointer;
  bool created = false;
};

/// Front for the configured backends. Puts go to the active backend; proxies
/// resolve through whichever backend the pointer names.
class RecordStore {
 public:
  RecordStore(std::unique_ptr<Backend> active, std::shared_ptr<AuditLog> audit);

  void addBackend(std::unique_ptr<Backend> backend);

  /// Validates, then stores the canonical bytes. Throws SchemaViolation or BackendUnavailable.
  PutResult put(const Resource& resource);
  /// Removes an object written by a put whose on-chain write failed.
  bool remove(const StoragePointer& pointer);

  RecordProxy makeProxy(const StoragePointer& pointer, const Digest& expectedHash);
  Resource resolve(RecordProxy& proxy, const std::string& accessorId) { return proxy.resolve(accessorId); }

  Backend& active() { return *backends_.at(activeKind_); }
  Backend* backend(BackendKind kind);
  std::size_t objectCount() const;
  AuditLog& auditLog() { return *audit_; }

 private:
  BackendKind activeKind_;
  std::map<BackendKind, std::unique_ptr<Backend>> backends_;
  std::shared_ptr<AuditLog> audit_;
};

}  // namespace dash::records
