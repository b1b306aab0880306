#pragma once

#include <string>
#include <vector>

#include "vexlab/report.hpp"

namespace vexlab {

namespace detail {

inline bool schema_type_matches(const std::string& type, const Json& inst) {
  if (type == "object") return inst.is_object();
  if (type == "array") return inst.is_array();
  if (type == "string") return inst.is_string();
  if (type == "number") return inst.is_number();
  if (type == "integer") return inst.is_number_integer() || inst.is_number_unsigned();
  if (type == "boolean") return inst.is_boolean();
  if (type == "null") return inst.is_null();
  return false;
}

inline void validate_schema_node(const Json& schema, const Json& inst,
                                 const std::string& path, std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const Json& t = schema.at("type");
    bool ok = false;
    if (t.is_string()) {
      ok = schema_type_matches(t.get<std::string>(), inst);
    } else {
      for (const auto& alt : t) ok = ok || schema_type_matches(alt.get<std::string>(), inst);
    }
    if (!ok) {
      errors.push_back(path + ": type mismatch (expected " + t.dump() + ")");
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& v : schema.at("enum")) ok = ok || v == inst;
    if (!ok) errors.push_back(path + ": value not in enum");
  }
  if (schema.contains("minimum") && inst.is_number()) {
    if (inst.get<double>() < schema.at("minimum").get<double>())
      errors.push_back(path + ": below minimum");
  }
  if (inst.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema.at("required")) {
        if (!inst.contains(key.get<std::string>()))
          errors.push_back(path + ": missing required key '" + key.get<std::string>() + "'");
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema.at("properties").items()) {
        if (inst.contains(key))
          validate_schema_node(sub, inst.at(key), path + "/" + key, errors);
      }
      if (schema.value("additionalProperties", true) == false) {
        for (const auto& [key, value] : inst.items()) {
          (void)value;
          if (!schema.at("properties").contains(key))
            errors.push_back(path + ": unexpected key '" + key + "'");
        }
      }
    }
  }
  if (inst.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& el : inst) {
      validate_schema_node(schema.at("items"), el, path + "/" + std::to_string(i), errors);
      ++i;
    }
  }
}

}  // namespace detail

/// Validates an instance against the subset of JSON Schema used by the report
/// schema shipped in schema/report.schema.json: type (string or alternatives),
/// required, properties, additionalProperties:false, items, enum, minimum.
/// Returns the list of violations; empty means valid.
inline std::vector<std::string> validate_against_schema(const Json& schema,
                                                        const Json& instance) {
  std::vector<std::string> errors;
  detail::validate_schema_node(schema, instance, "", errors);
  return errors;
}

}  // namespace vexlab
