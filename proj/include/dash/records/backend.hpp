#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "dash/bytes.hpp"

namespace dash::records {

enum class BackendKind { Memory, File };

std::string_view toString(BackendKind k);
std::optional<BackendKind> parseBackendKind(std::string_view s);

/// Where an off-chain record lives. Rendered on chain as "<backend>:<locator>".
struct StoragePointer {
  BackendKind backend = BackendKind::Memory;
  std::string locator;

  std::string str() const;
  static StoragePointer parse(std::string_view s);  // throws InvalidArgument
  bool operator==(const StoragePointer&) const = default;
};

/// Content-addressed byte store. Locators are the hex digest of the bytes.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendKind kind() const = 0;
  /// Returns the locator and whether a new object was written.
  virtual std::pair<std::string, bool> put(const Digest& digest, const std::string& bytes) = 0;
  virtual std::optional<std::string> get(std::string_view locator) = 0;
  virtual bool erase(std::string_view locator) = 0;
  virtual std::size_t count() const = 0;

  std::uint64_t reads() const { return reads_.load(); }

 protected:
  std::atomic<std::uint64_t> reads_{0};
};

class MemoryBackend final : public Backend {
 public:
  BackendKind kind() const override { return BackendKind::Memory; }
  std::pair<std::string, bool> put(const Digest& digest, const std::string& bytes) override;
  std::optional<std::string> get(std::string_view locator) override;
  bool erase(std::string_view locator) override;
  std::size_t count() const override;
  /// Test hook: overwrite stored bytes in place.
  void corrupt(std::string_view locator, std::string bytes);

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string, std::less<>> objects_;
};

/// One file per record, named by hex digest, holding the canonical bytes.
class FileBackend final : public Backend {
 public:
  explicit FileBackend(std::filesystem::path dir);
  BackendKind kind() const override { return BackendKind::File; }
  std::pair<std::string, bool> put(const Digest& digest, const std::string& bytes) override;
  std::optional<std::string> get(std::string_view locator) override;
  bool erase(std::string_view locator) override;
  std::size_t count() const override;
  std::filesystem::path pathOf(std::string_view locator) const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

}  // namespace dash::records
