#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcrl/schema.hpp"
#include "tcrl/toolcall.hpp"
#include "tcrl/value.hpp"

namespace tcrl {

enum class Role { user, assistant, tool };
enum class Source { toolace, xlam, synthetic };

std::string_view to_string(Role r);
std::string_view to_string(Source s);
std::optional<Role> role_from_string(std::string_view s);
std::optional<Source> source_from_string(std::string_view s);

struct Turn {
  Role role = Role::user;
  std::string content;
  std::optional<AnswerSet> calls;         // assistant turns
  std::optional<std::string> observation; // tool turns
  std::vector<ToolSchema> schemas;        // tools introduced at this turn
};

/// Where an augmented sample came from.
struct Provenance {
  std::string strategy;
  std::vector<std::string> parents;
  std::uint64_t seed = 0;
  bool fallback_pairing = false;
  std::string detail;
};

struct Sample {
  std::string id;
  std::vector<ToolSchema> schemas;
  std::vector<Turn> turns;
  AnswerSet gt;
  std::string gt_text;
  Source source = Source::synthetic;
  bool multi_turn = false;
  std::optional<Provenance> provenance;

  std::size_t user_turns() const;
};

/// JSONL record form; field names match the struct members.
Value sample_to_value(const Sample& s);
std::string sample_to_json(const Sample& s);

/// Strict decoding of a normalized record. Throws SchemaError for structural
/// problems and ParseError for unusable answers.
Sample sample_from_value(const Value& v);

std::string samples_to_jsonl(const std::vector<Sample>& samples);

}  // namespace tcrl
