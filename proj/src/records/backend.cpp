#include "dash/records/backend.hpp"

#include <fstream>
#include <sstream>

#include "dash/error.hpp"
#include "dash/ledger/chain_store.hpp"

namespace dash::records {

namespace fs = std::filesystem;

std::string_view toString(BackendKind k) { return k == BackendKind::Memory ? "memory" : "file"; }

std::optional<BackendKind> parseBackendKind(std::string_view s) {
  if (s == "memory") return BackendKind::Memory;
  if (s == "file") return BackendKind::File;
  return std::nullopt;
}

std::string StoragePointer::str() const { return std::string(toString(backend)) + ":" + locator; }

StoragePointer StoragePointer::parse(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos) fail(ErrorCode::InvalidArgument, "bad storage pointer '" + std::string(s) + "'");
  auto kind = parseBackendKind(s.substr(0, colon));
  if (!kind || colon + 1 == s.size()) fail(ErrorCode::InvalidArgument, "bad storage pointer '" + std::string(s) + "'");
  return StoragePointer{*kind, std::string(s.substr(colon + 1))};
}

std::pair<std::string, bool> MemoryBackend::put(const Digest& digest, const std::string& bytes) {
  std::lock_guard lk(mu_);
  auto locator = digest.hex();
  bool created = objects_.try_emplace(locator, bytes).second;
  return {locator, created};
}

std::optional<std::string> MemoryBackend::get(std::string_view locator) {
  ++reads_;
  std::lock_guard lk(mu_);
  auto it = objects_.find(locator);
  if (it == objects_.end()) return std::nullopt;
  return it->second;
}

bool MemoryBackend::erase(std::string_view locator) {
  std::lock_guard lk(mu_);
  auto it = objects_.find(locator);
  if (it == objects_.end()) return false;
  objects_.erase(it);
  return true;
}

std::size_t MemoryBackend::count() const {
  std::lock_guard lk(mu_);
  return objects_.size();
}

void MemoryBackend::corrupt(std::string_view locator, std::string bytes) {
  std::lock_guard lk(mu_);
  auto it = objects_.find(locator);
  if (it != objects_.end()) it->second = std::move(bytes);
}

FileBackend::FileBackend(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::BackendUnavailable, "cannot create " + dir_.string() + ": " + ec.message());
}

fs::path FileBackend::pathOf(std::string_view locator) const { return dir_ / (std::string(locator) + ".json"); }

namespace {

bool isHexLocator(std::string_view locator) {
  Digest d;
  return Digest::tryFromHex(locator, d);
}

}  // namespace

std::pair<std::string, bool> FileBackend::put(const Digest& digest, const std::string& bytes) {
  std::lock_guard lk(mu_);
  auto locator = digest.hex();
  auto path = pathOf(locator);
  if (fs::exists(path)) return {locator, false};
  try {
    ledger::writeFileAtomic(path, bytes);
  } catch (const std::exception& e) {
    fail(ErrorCode::BackendUnavailable, e.what());
  }
  return {locator, true};
}

std::optional<std::string> FileBackend::get(std::string_view locator) {
  ++reads_;
  if (!isHexLocator(locator)) return std::nullopt;
  std::ifstream in(pathOf(locator), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool FileBackend::erase(std::string_view locator) {
  if (!isHexLocator(locator)) return false;
  std::lock_guard lk(mu_);
  std::error_code ec;
  return fs::remove(pathOf(locator), ec);
}

std::size_t FileBackend::count() const {
  std::lock_guard lk(mu_);
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() == ".json") ++n;
  }
  return n;
}

}  // namespace dash::records
