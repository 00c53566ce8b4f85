#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "dash/hash.hpp"

namespace dash::bench {

struct FlyweightOptions {
  std::size_t patients = 1000;
  std::size_t plans = 5;
  bool flyweight = true;
  std::uint32_t difficulty = 0;
};

struct FlyweightReport {
  std::size_t patients = 0;
  std::size_t plans = 0;
  bool flyweight = true;
  std::size_t storedDescriptors = 0;  // descriptor copies held in contract storage
  std::uint64_t planBytes = 0;        // bytes of those descriptors
  std::uint64_t referenceBytes = 0;   // per-account planRef + extrinsic bytes
  std::uint64_t planGas = 0;          // gas of the intern + set-plan transactions
  double seconds = 0;

  Json toJson() const;
  static std::string csvHeader();
  std::string csvRow() const;
};

/// Onboards `patients` patients over `plans` distinct insurance plans
/// through the service layer and measures plan storage.
FlyweightReport runFlyweight(const FlyweightOptions& options);

struct PubsubOptions {
  std::size_t providers = 50;
  std::size_t blocks = 100;
  std::size_t events = 100;
  bool polling = false;
  std::uint32_t difficulty = 0;
  std::uint64_t seed = 7;
};

struct PubsubReport {
  std::size_t providers = 0;
  std::size_t blocks = 0;
  std::size_t events = 0;
  std::uint64_t pubsubWork = 0;       // (event, subscriber) matches routed
  std::uint64_t expectedMatches = 0;  // brute-force count over the same receipts
  std::uint64_t delivered = 0;        // notifications in subscriber feeds
  bool polling = false;
  std::uint64_t pollingScans = 0;
  std::uint64_t pollingFound = 0;
  double ratio = 0;                   // pollingScans / pubsubWork
  double seconds = 0;

  Json toJson() const;
  static std::string csvHeader();
  std::string csvRow() const;
};

/// Provider i subscribes to patient i's account; `events` prescription
/// requests from random patients are spread over `blocks` blocks.
PubsubReport runPubsub(const PubsubOptions& options);

}  // namespace dash::bench
