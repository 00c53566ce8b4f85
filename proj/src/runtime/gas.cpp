#include "dash/runtime/gas.hpp"

#include <limits>

#include "dash/json_util.hpp"

namespace dash::runtime {

Json GasSchedule::toJson() const {
  return Json{{"perStep", perStep}, {"perStoredByte", perStoredByte}, {"perEvent", perEvent}, {"txBase", txBase}};
}

GasSchedule GasSchedule::fromJson(const Json& j) {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  return GasSchedule{json::u64(j, "perStep", kCode), json::u64(j, "perStoredByte", kCode),
                     json::u64(j, "perEvent", kCode), json::u64(j, "txBase", kCode)};
}

std::uint64_t GasMeter::fee(const GasSchedule& s, std::uint64_t steps, std::uint64_t storedBytes,
                            std::uint64_t events) {
  unsigned __int128 total = static_cast<unsigned __int128>(steps) * s.perStep +
                            static_cast<unsigned __int128>(storedBytes) * s.perStoredByte +
                            static_cast<unsigned __int128>(events) * s.perEvent;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  return total > kMax ? kMax : static_cast<std::uint64_t>(total);
}

std::uint64_t GasMeter::charge(std::uint64_t steps, std::uint64_t storedBytes, std::uint64_t events) {
  return chargeFlat(fee(schedule_, steps, storedBytes, events));
}

std::uint64_t GasMeter::chargeFlat(std::uint64_t amount) {
  if (amount > limit_ - used_) {
    used_ = limit_;
    throw OutOfGas();
  }
  used_ += amount;
  return amount;
}

}  // namespace dash::runtime
