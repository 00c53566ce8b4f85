#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dash/bytes.hpp"
#include "dash/clock.hpp"

namespace dash::records {

struct AuditEntry {
  std::string accessorId;
  Digest recordHash;
  std::uint64_t timestamp = 0;
};

/// Serialized appender; mirrors to a JSON-lines file when given a path.
class AuditLog {
 public:
  explicit AuditLog(std::shared_ptr<Clock> clock, std::optional<std::filesystem::path> file = std::nullopt);

  AuditEntry append(const std::string& accessorId, const Digest& recordHash);
  std::vector<AuditEntry> entries() const;
  std::size_t size() const;

 private:
  std::shared_ptr<Clock> clock_;
  std::optional<std::filesystem::path> file_;
  mutable std::mutex mu_;
  std::vector<AuditEntry> entries_;
};

}  // namespace dash::records
