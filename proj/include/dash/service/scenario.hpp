#pragma once

#include <iosfwd>
#include <string>

#include "dash/service/api.hpp"

namespace dash::service {

struct ScenarioSummary {
  std::size_t steps = 0;
  std::size_t failures = 0;  // steps whose "expect" status did not match
};

/// Replays JSON lines {step, actorKey, method, path, body[, expect]}.
/// actorKey is a literal key or "@<eoaLabel>" ("@admin", "@patient:p-1").
/// Writes one canonical JSON summary line per step to out.
ScenarioSummary runScenario(DashService& service, std::istream& in, std::ostream& out);

}  // namespace dash::service
