#pragma once

#include <cstdint>
#include <stdexcept>

#include "dash/hash.hpp"

namespace dash::runtime {

struct GasSchedule {
  std::uint64_t perStep = 10;
  std::uint64_t perStoredByte = 2;
  std::uint64_t perEvent = 20;
  std::uint64_t txBase = 100;

  Json toJson() const;
  static GasSchedule fromJson(const Json& j);
  bool operator==(const GasSchedule&) const = default;
};

struct OutOfGas : std::runtime_error {
  OutOfGas() : std::runtime_error("OutOfGas") {}
};

/// Accumulates fee units against a limit. An overdraw pins usage to the
/// limit and throws OutOfGas.
class GasMeter {
 public:
  GasMeter(const GasSchedule& schedule, std::uint64_t limit) : schedule_(schedule), limit_(limit) {}

  static std::uint64_t fee(const GasSchedule& s, std::uint64_t steps, std::uint64_t storedBytes,
                           std::uint64_t events);

  std::uint64_t charge(std::uint64_t steps, std::uint64_t storedBytes, std::uint64_t events);
  std::uint64_t chargeFlat(std::uint64_t amount);

  std::uint64_t used() const { return used_; }
  std::uint64_t limit() const { return limit_; }
  const GasSchedule& schedule() const { return schedule_; }

 private:
  GasSchedule schedule_;
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

}  // namespace dash::runtime
