#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dash/bytes.hpp"
#include "dash/hash.hpp"

namespace dash::records {

enum class ResourceType { Patient, MedicationRequest, Observation, Coverage };

std::string_view toString(ResourceType t);
std::optional<ResourceType> parseResourceType(std::string_view s);

using AttributeValue = std::variant<std::string, std::int64_t, bool>;

/// FHIR-lite record. Required attributes per type:
///
///   Patient            name:string, birthDate:string   (subjectPatientId == id)
///   MedicationRequest  medicationCode:string
///   Observation        code:string, value:string|integer|boolean
///   Coverage           payerName:string, planCode:string
struct Resource {
  ResourceType resourceType = ResourceType::Observation;
  std::string id;
  std::string subjectPatientId;
  std::map<std::string, AttributeValue> attributes;
  std::uint64_t authoredAt = 0;

  Json toJson() const;
  std::string canonical() const { return canonicalDump(toJson()); }
  Digest digest() const { return sha256(canonical()); }

  /// Parses and validates. Throws SchemaViolation listing every field error.
  static Resource fromJson(const Json& j);

  bool operator==(const Resource&) const = default;
};

/// Empty when the resource satisfies its type's schema.
std::vector<std::string> schemaErrors(const Resource& r);
/// Throws SchemaViolation.
void validateResource(const Resource& r);

}  // namespace dash::records
