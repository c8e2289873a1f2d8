#include "tcrl/sample.hpp"

#include <cmath>

#include "tcrl/errors.hpp"
#include "tcrl/json_value.hpp"
#include "tcrl/reward.hpp"

namespace tcrl {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    case Role::tool: return "tool";
  }
  return "user";
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::toolace: return "toolace";
    case Source::xlam: return "xlam";
    case Source::synthetic: return "synthetic";
  }
  return "synthetic";
}

std::optional<Role> role_from_string(std::string_view s) {
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  if (s == "tool") return Role::tool;
  return std::nullopt;
}

std::optional<Source> source_from_string(std::string_view s) {
  if (s == "toolace") return Source::toolace;
  if (s == "xlam") return Source::xlam;
  if (s == "synthetic") return Source::synthetic;
  return std::nullopt;
}

std::size_t Sample::user_turns() const {
  std::size_t n = 0;
  for (const auto& t : turns) n += t.role == Role::user ? 1 : 0;
  return n;
}

namespace {

Value turn_to_value(const Turn& t) {
  Object o;
  o.push_back(Member{"role", Value(std::string(to_string(t.role)))});
  o.push_back(Member{"content", Value(t.content)});
  if (t.calls) o.push_back(Member{"calls", answer_to_value(*t.calls)});
  if (t.observation) o.push_back(Member{"observation", Value(*t.observation)});
  if (!t.schemas.empty()) o.push_back(Member{"schemas", schemas_to_value(t.schemas)});
  return Value(std::move(o));
}

Value provenance_to_value(const Provenance& p) {
  Object o;
  o.push_back(Member{"strategy", Value(p.strategy)});
  List parents;
  for (const auto& id : p.parents) parents.push_back(Value(id));
  o.push_back(Member{"parents", Value(std::move(parents))});
  o.push_back(Member{"seed", Value(*Decimal::from_text(std::to_string(p.seed)))});
  o.push_back(Member{"fallback_pairing", Value(p.fallback_pairing)});
  if (!p.detail.empty()) o.push_back(Member{"detail", Value(p.detail)});
  return Value(std::move(o));
}

const std::string& string_field(const Value& v, const char* what) {
  if (!v.is_string()) throw SchemaError(std::string("\"") + what + "\" must be a string");
  return v.as_string();
}

Turn turn_from_value(const Value& v) {
  if (!v.is_object()) throw SchemaError("turn must be an object");
  Turn t;
  bool have_role = false;
  for (const auto& m : v.as_object()) {
    if (m.key == "role") {
      auto role = role_from_string(string_field(m.value, "role"));
      if (!role) throw SchemaError("unknown turn role \"" + m.value.as_string() + "\"");
      t.role = *role;
      have_role = true;
    } else if (m.key == "content") {
      if (!m.value.is_null()) t.content = string_field(m.value, "content");
    } else if (m.key == "calls") {
      if (!m.value.is_null()) t.calls = answer_from_value(m.value);
    } else if (m.key == "observation") {
      if (!m.value.is_null()) t.observation = string_field(m.value, "observation");
    } else if (m.key == "schemas") {
      t.schemas = schemas_from_value(m.value);
    } else {
      throw SchemaError("unknown turn field \"" + m.key + "\"");
    }
  }
  if (!have_role) throw SchemaError("turn is missing \"role\"");
  if (t.role == Role::tool && !t.observation) throw SchemaError("tool turn needs \"observation\"");
  if (t.calls && t.role != Role::assistant) throw SchemaError("only assistant turns carry calls");
  return t;
}

Provenance provenance_from_value(const Value& v) {
  if (!v.is_object()) throw SchemaError("provenance must be an object");
  Provenance p;
  for (const auto& m : v.as_object()) {
    if (m.key == "strategy") {
      p.strategy = string_field(m.value, "strategy");
    } else if (m.key == "parents") {
      if (!m.value.is_list()) throw SchemaError("\"parents\" must be an array");
      for (const auto& id : m.value.as_list()) p.parents.push_back(string_field(id, "parents"));
    } else if (m.key == "seed") {
      if (!m.value.is_number()) throw SchemaError("\"seed\" must be a number");
      p.seed = static_cast<std::uint64_t>(std::stoull(m.value.as_number().to_string()));
    } else if (m.key == "fallback_pairing") {
      if (!m.value.is_bool()) throw SchemaError("\"fallback_pairing\" must be a boolean");
      p.fallback_pairing = m.value.as_bool();
    } else if (m.key == "detail") {
      p.detail = string_field(m.value, "detail");
    } else {
      throw SchemaError("unknown provenance field \"" + m.key + "\"");
    }
  }
  return p;
}

}  // namespace

Value sample_to_value(const Sample& s) {
  Object o;
  o.push_back(Member{"id", Value(s.id)});
  o.push_back(Member{"schemas", schemas_to_value(s.schemas)});
  List turns;
  for (const auto& t : s.turns) turns.push_back(turn_to_value(t));
  o.push_back(Member{"turns", Value(std::move(turns))});
  o.push_back(Member{"gt", answer_to_value(s.gt)});
  o.push_back(Member{"gt_text", Value(s.gt_text)});
  o.push_back(Member{"source", Value(std::string(to_string(s.source)))});
  o.push_back(Member{"multi_turn", Value(s.multi_turn)});
  if (s.provenance) o.push_back(Member{"provenance", provenance_to_value(*s.provenance)});
  return Value(std::move(o));
}

std::string sample_to_json(const Sample& s) { return dump_json(sample_to_value(s)); }

std::string samples_to_jsonl(const std::vector<Sample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    out += sample_to_json(s);
    out.push_back('\n');
  }
  return out;
}

Sample sample_from_value(const Value& v) {
  if (!v.is_object()) throw SchemaError("sample must be an object");
  Sample s;
  bool have_id = false;
  bool have_turns = false;
  bool have_gt_text = false;
  bool have_schemas = false;
  std::optional<Value> gt_value;
  std::optional<bool> multi_turn;
  for (const auto& m : v.as_object()) {
    if (m.key == "id") {
      s.id = string_field(m.value, "id");
      have_id = true;
    } else if (m.key == "schemas") {
      s.schemas = schemas_from_value(m.value);
      have_schemas = true;
    } else if (m.key == "turns") {
      if (!m.value.is_list()) throw SchemaError("\"turns\" must be an array");
      for (const auto& t : m.value.as_list()) s.turns.push_back(turn_from_value(t));
      have_turns = true;
    } else if (m.key == "gt") {
      gt_value = m.value;
    } else if (m.key == "gt_text") {
      s.gt_text = string_field(m.value, "gt_text");
      have_gt_text = true;
    } else if (m.key == "source") {
      auto src = source_from_string(string_field(m.value, "source"));
      if (!src) throw SchemaError("unknown source \"" + m.value.as_string() + "\"");
      s.source = *src;
    } else if (m.key == "multi_turn") {
      if (!m.value.is_bool()) throw SchemaError("\"multi_turn\" must be a boolean");
      multi_turn = m.value.as_bool();
    } else if (m.key == "provenance") {
      s.provenance = provenance_from_value(m.value);
    } else {
      throw SchemaError("unknown sample field \"" + m.key + "\"");
    }
  }
  if (!have_id || !have_turns || !have_gt_text || !have_schemas) {
    throw SchemaError("sample needs \"id\", \"schemas\", \"turns\" and \"gt_text\"");
  }
  if (s.user_turns() == 0) throw SchemaError("sample has no user turn");
  if (gt_value) {
    s.gt = answer_from_value(*gt_value);
    if (!s.gt.direct_response) {
      auto parsed = try_parse_answer(s.gt_text);
      if (!parsed) throw ParseError(0, "gt_text that parses as a tool-call answer");
      if (!ast_equal(*parsed, s.gt)) {
        throw ParseError(0, "gt_text consistent with gt");
      }
    }
  } else {
    auto parsed = try_parse_answer(s.gt_text);
    if (!parsed) throw ParseError(0, "gt_text that parses as a tool-call answer");
    s.gt = std::move(*parsed);
  }
  s.multi_turn = multi_turn.value_or(s.user_turns() > 1);
  return s;
}

}  // namespace tcrl
