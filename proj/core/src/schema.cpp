#include "tcrl/schema.hpp"

#include <algorithm>
#include <cctype>

#include "literal_parser.hpp"
#include "tcrl/errors.hpp"
#include "tcrl/json_value.hpp"

namespace tcrl {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string optional_string(const Object& o, std::string_view key, const std::string& where) {
  const Value* v = find_member(o, key);
  if (v == nullptr || v->is_null()) return {};
  if (!v->is_string()) {
    throw SchemaError(where + ": \"" + std::string(key) + "\" must be a string");
  }
  return v->as_string();
}

ParamSpec param_from_value(const Value& v, const std::string& where, bool required_default) {
  if (!v.is_object()) throw SchemaError(where + ": parameter spec must be an object");
  const Object& o = v.as_object();
  ParamSpec spec;
  spec.required = required_default;
  if (const Value* t = find_member(o, "type")) {
    if (t->is_string()) {
      spec.type_tag = normalize_type_tag(t->as_string());
    } else if (t->is_list() && !t->as_list().empty() && t->as_list().front().is_string()) {
      spec.type_tag = normalize_type_tag(t->as_list().front().as_string());
    }
  }
  spec.description = optional_string(o, "description", where);
  if (const Value* r = find_member(o, "required")) {
    if (!r->is_bool()) throw SchemaError(where + ": \"required\" must be a boolean");
    spec.required = r->as_bool();
  }
  return spec;
}

}  // namespace

const ParamSpec* ToolSchema::find_parameter(std::string_view param) const {
  for (const auto& [name, spec] : parameters) {
    if (name == param) return &spec;
  }
  return nullptr;
}

std::string normalize_type_tag(std::string_view raw) {
  std::string t = lower(raw);
  if (auto comma = t.find(','); comma != std::string::npos) t.resize(comma);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  if (auto bracket = t.find('['); bracket != std::string::npos) t.resize(bracket);
  if (t == "string" || t == "str" || t == "text") return "string";
  if (t == "integer" || t == "int") return "integer";
  if (t == "float" || t == "number" || t == "double") return "float";
  if (t == "boolean" || t == "bool") return "boolean";
  if (t == "array" || t == "list" || t == "tuple" || t == "set") return "array";
  if (t == "object" || t == "dict" || t == "mapping") return "object";
  return "any";
}

ToolSchema schema_from_value(const Value& v) {
  if (!v.is_object()) throw SchemaError("schema entry must be an object");
  const Object& o = v.as_object();
  ToolSchema schema;
  const Value* name = find_member(o, "name");
  if (name == nullptr) throw SchemaError("schema is missing \"name\"");
  if (!name->is_string() || !detail::is_identifier(name->as_string())) {
    throw SchemaError("schema \"name\" must be an identifier string");
  }
  schema.name = name->as_string();
  std::string where = "schema '" + schema.name + "'";
  schema.description = optional_string(o, "description", where);

  const Value* params = find_member(o, "parameters");
  if (params == nullptr || params->is_null()) return schema;
  if (!params->is_object()) throw SchemaError(where + ": \"parameters\" must be an object");
  const Object& p = params->as_object();

  const Value* properties = find_member(p, "properties");
  const Value* type = find_member(p, "type");
  bool json_schema_style = properties != nullptr && properties->is_object() &&
                           (type == nullptr || (type->is_string() && type->as_string() == "object"));
  if (json_schema_style) {
    std::vector<std::string> required;
    if (const Value* r = find_member(p, "required")) {
      if (!r->is_list()) throw SchemaError(where + ": \"required\" must be an array");
      for (const auto& item : r->as_list()) {
        if (!item.is_string()) throw SchemaError(where + ": \"required\" entries must be strings");
        required.push_back(item.as_string());
      }
    }
    for (const auto& m : properties->as_object()) {
      bool req = std::find(required.begin(), required.end(), m.key) != required.end();
      schema.parameters.emplace_back(m.key, param_from_value(m.value, where, req));
    }
    return schema;
  }
  for (const auto& m : p) {
    schema.parameters.emplace_back(m.key, param_from_value(m.value, where, false));
  }
  return schema;
}

std::vector<ToolSchema> schemas_from_value(const Value& v) {
  if (!v.is_list()) throw SchemaError("tool schemas must be a JSON array");
  std::vector<ToolSchema> out;
  out.reserve(v.as_list().size());
  for (const auto& item : v.as_list()) out.push_back(schema_from_value(item));
  return out;
}

std::vector<ToolSchema> parse_tool_schemas(std::string_view text) {
  Value v;
  try {
    v = parse_json(text);
  } catch (const ParseError& e) {
    throw SchemaError(std::string("invalid schema JSON: ") + e.what());
  }
  return schemas_from_value(v);
}

Value schema_to_value(const ToolSchema& schema) {
  Object params;
  for (const auto& [name, spec] : schema.parameters) {
    Object p;
    p.push_back(Member{"type", Value(spec.type_tag)});
    p.push_back(Member{"description", Value(spec.description)});
    p.push_back(Member{"required", Value(spec.required)});
    params.push_back(Member{name, Value(std::move(p))});
  }
  Object out;
  out.push_back(Member{"name", Value(schema.name)});
  out.push_back(Member{"description", Value(schema.description)});
  out.push_back(Member{"parameters", Value(std::move(params))});
  return Value(std::move(out));
}

Value schemas_to_value(const std::vector<ToolSchema>& schemas) {
  List out;
  out.reserve(schemas.size());
  for (const auto& s : schemas) out.push_back(schema_to_value(s));
  return Value(std::move(out));
}

}  // namespace tcrl
