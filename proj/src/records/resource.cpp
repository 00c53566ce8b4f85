#include "dash/records/resource.hpp"

#include <algorithm>

#include "dash/error.hpp"

namespace dash::records {

std::string_view toString(ResourceType t) {
  switch (t) {
    case ResourceType::Patient: return "Patient";
    case ResourceType::MedicationRequest: return "MedicationRequest";
    case ResourceType::Observation: return "Observation";
    case ResourceType::Coverage: return "Coverage";
  }
  return "";
}

std::optional<ResourceType> parseResourceType(std::string_view s) {
  for (auto t : {ResourceType::Patient, ResourceType::MedicationRequest, ResourceType::Observation,
                 ResourceType::Coverage}) {
    if (toString(t) == s) return t;
  }
  return std::nullopt;
}

Json Resource::toJson() const {
  Json attrs = Json::object();
  for (const auto& [k, v] : attributes) std::visit([&](const auto& x) { attrs[k] = x; }, v);
  return Json{{"resourceType", toString(resourceType)},
              {"id", id},
              {"subjectPatientId", subjectPatientId},
              {"attributes", std::move(attrs)},
              {"authoredAt", authoredAt}};
}

namespace {

struct Requirement {
  const char* name;
  bool anyScalar;  // false: string only
};

std::vector<Requirement> requiredAttributes(ResourceType t) {
  switch (t) {
    case ResourceType::Patient: return {{"name", false}, {"birthDate", false}};
    case ResourceType::MedicationRequest: return {{"medicationCode", false}};
    case ResourceType::Observation: return {{"code", false}, {"value", true}};
    case ResourceType::Coverage: return {{"payerName", false}, {"planCode", false}};
  }
  return {};
}

[[noreturn]] void throwViolations(const std::vector<std::string>& errors) {
  std::string detail;
  for (const auto& e : errors) detail += (detail.empty() ? "" : "; ") + e;
  fail(ErrorCode::SchemaViolation, detail);
}

}  // namespace

std::vector<std::string> schemaErrors(const Resource& r) {
  std::vector<std::string> errors;
  if (r.id.empty()) errors.push_back("id: must be non-empty");
  if (r.resourceType == ResourceType::Patient) {
    if (r.subjectPatientId != r.id) errors.push_back("subjectPatientId: must equal id for Patient");
  } else if (r.subjectPatientId.empty()) {
    errors.push_back("subjectPatientId: must be non-empty");
  }
  for (const auto& req : requiredAttributes(r.resourceType)) {
    auto it = r.attributes.find(req.name);
    if (it == r.attributes.end()) {
      errors.push_back(std::string("attributes.") + req.name + ": required");
    } else if (!req.anyScalar && !std::holds_alternative<std::string>(it->second)) {
      errors.push_back(std::string("attributes.") + req.name + ": must be a string");
    } else if (const auto* s = std::get_if<std::string>(&it->second); s && s->empty()) {
      errors.push_back(std::string("attributes.") + req.name + ": must be non-empty");
    }
  }
  return errors;
}

void validateResource(const Resource& r) {
  auto errors = schemaErrors(r);
  if (!errors.empty()) throwViolations(errors);
}

Resource Resource::fromJson(const Json& j) {
  std::vector<std::string> errors;
  if (!j.is_object()) throwViolations({"resource: must be an object"});

  Resource r;
  auto typeIt = j.find("resourceType");
  if (typeIt == j.end() || !typeIt->is_string()) {
    throwViolations({"resourceType: required string"});
  }
  auto type = parseResourceType(typeIt->get<std::string>());
  if (!type) throwViolations({"resourceType: unknown '" + typeIt->get<std::string>() + "'"});
  r.resourceType = *type;

  if (auto it = j.find("id"); it != j.end() && it->is_string()) r.id = it->get<std::string>();
  else errors.push_back("id: required string");

  if (auto it = j.find("subjectPatientId"); it != j.end()) {
    if (it->is_string()) r.subjectPatientId = it->get<std::string>();
    else errors.push_back("subjectPatientId: must be a string");
  } else if (r.resourceType == ResourceType::Patient) {
    r.subjectPatientId = r.id;
  }

  if (auto it = j.find("authoredAt");
      it != j.end() && it->is_number_integer() && (it->is_number_unsigned() || it->get<std::int64_t>() >= 0))
    r.authoredAt = it->get<std::uint64_t>();
  else errors.push_back("authoredAt: required non-negative integer");

  if (auto it = j.find("attributes"); it != j.end() && it->is_object()) {
    for (const auto& [k, v] : it->items()) {
      if (v.is_string()) r.attributes[k] = v.get<std::string>();
      else if (v.is_boolean()) r.attributes[k] = v.get<bool>();
      else if (v.is_number_integer() && (!v.is_number_unsigned() || v.get<std::uint64_t>() <= INT64_MAX))
        r.attributes[k] = v.get<std::int64_t>();
      else errors.push_back("attributes." + k + ": must be string, integer or boolean");
    }
  } else {
    errors.push_back("attributes: required object");
  }

  for (const auto& [k, _] : j.items()) {
    if (k != "resourceType" && k != "id" && k != "subjectPatientId" && k != "attributes" && k != "authoredAt")
      errors.push_back(k + ": unexpected field");
  }

  auto more = schemaErrors(r);
  // Skip duplicates already reported by the shape checks above.
  for (auto& e : more) {
    if (std::find(errors.begin(), errors.end(), e) == errors.end() && !(e.starts_with("id:") && !j.contains("id")))
      errors.push_back(std::move(e));
  }
  if (!errors.empty()) throwViolations(errors);
  return r;
}

}  // namespace dash::records
