#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcrl/value.hpp"

namespace tcrl {

struct ParamSpec {
  std::string type_tag = "any";  // string|integer|float|boolean|array|object|any
  std::string description;
  bool required = false;
};

struct ToolSchema {
  std::string name;
  std::string description;
  std::vector<std::pair<std::string, ParamSpec>> parameters;

  const ParamSpec* find_parameter(std::string_view name) const;
};

/// JSON array of schema objects. Parameters may be given flat
/// (`{"p": {"type": ..}}`) or JSON-Schema style (`{"type": "object",
/// "properties": {...}, "required": [...]}`). Unknown fields are ignored.
/// Throws SchemaError, including for malformed JSON and duplicate keys.
std::vector<ToolSchema> parse_tool_schemas(std::string_view text);
std::vector<ToolSchema> schemas_from_value(const Value& value);
ToolSchema schema_from_value(const Value& value);

/// Flat form: {"name", "description", "parameters": {p: {"type",
/// "description", "required"}}}.
Value schema_to_value(const ToolSchema& schema);
Value schemas_to_value(const std::vector<ToolSchema>& schemas);

/// Maps corpus type spellings (str, int, List[str], "str, optional", ...) onto
/// the closed tag set.
std::string normalize_type_tag(std::string_view raw);

}  // namespace tcrl
