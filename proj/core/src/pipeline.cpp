#include "tcrl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "random.hpp"
#include "tcrl/errors.hpp"
#include "tcrl/json_value.hpp"
#include "tcrl/reward.hpp"

namespace tcrl {

namespace {

Value count(std::size_t n) { return Value::integer(static_cast<std::int64_t>(n)); }

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() < width ? std::string(width - s.size(), ' ') + s : s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Filtering

Value FilterReport::to_value() const {
  Object o;
  o.push_back(Member{"input", count(input)});
  o.push_back(Member{"kept", count(kept)});
  o.push_back(Member{"dropped_bad_call", count(dropped_bad_call)});
  o.push_back(Member{"dropped_bad_schema", count(dropped_bad_schema)});
  o.push_back(Member{"dropped_duplicate_id", count(dropped_duplicate_id)});
  o.push_back(Member{"dropped_malformed", count(dropped_malformed)});
  return Value(std::move(o));
}

std::string FilterReport::to_text() const {
  const std::pair<const char*, std::size_t> rows[] = {
      {"input", input},
      {"kept", kept},
      {"dropped_bad_call", dropped_bad_call},
      {"dropped_bad_schema", dropped_bad_schema},
      {"dropped_duplicate_id", dropped_duplicate_id},
      {"dropped_malformed", dropped_malformed},
  };
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, std::to_string(r.second).size());
  std::string out;
  for (const auto& r : rows) {
    out += pad_right(r.first, 22) + pad_left(std::to_string(r.second), width) + "\n";
  }
  return out;
}

Value normalize_record(const Value& record) {
  if (!record.is_object()) return record;
  const Object& in = record.as_object();
  if (find_member(in, "turns") || !find_member(in, "query") || !find_member(in, "answers")) {
    return record;
  }
  Object out;
  if (const Value* id = find_member(in, "id")) {
    out.push_back(Member{"id", id->is_string() ? *id : Value(dump_json(*id))});
  }
  if (const Value* tools = find_member(in, "tools")) {
    out.push_back(Member{"schemas", *tools});
  }
  Object turn;
  turn.push_back(Member{"role", Value("user")});
  turn.push_back(Member{"content", *find_member(in, "query")});
  out.push_back(Member{"turns", Value(List{Value(std::move(turn))})});
  const Value& answers = *find_member(in, "answers");
  out.push_back(Member{"gt_text", answers.is_string() ? answers : Value(dump_json(answers))});
  out.push_back(Member{"source", Value("xlam")});
  return Value(std::move(out));
}

namespace {

// Returns the failure reason, empty when the reference answer is usable.
std::string check_call(const Object& record) {
  const Value* gt_text = find_member(record, "gt_text");
  const Value* gt = find_member(record, "gt");
  try {
    if (gt) {
      AnswerSet expected = answer_from_value(*gt);
      if (expected.is_direct_response()) return {};
      if (!gt_text || !gt_text->is_string()) return "missing gt_text";
      auto parsed = try_parse_answer(gt_text->as_string());
      if (!parsed) return "gt_text does not parse";
      if (!ast_equal(*parsed, expected)) return "gt_text disagrees with gt";
      return {};
    }
  } catch (const ParseError& e) {
    return std::string("gt: ") + e.what();
  }
  if (!gt_text || !gt_text->is_string()) return "missing gt_text";
  if (!try_parse_answer(gt_text->as_string())) return "gt_text does not parse";
  return {};
}

// Parses the candidate tools in place (a JSON string becomes the inline array).
std::string check_schemas(Object& record) {
  Value* schemas = find_member(record, "schemas");
  if (!schemas) return "missing schemas";
  try {
    if (schemas->is_string()) {
      *schemas = schemas_to_value(parse_tool_schemas(schemas->as_string()));
    } else {
      schemas_from_value(*schemas);
    }
  } catch (const SchemaError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

FilterResult filter_corpus(const std::vector<std::string>& lines,
                           const std::vector<std::size_t>& line_numbers) {
  FilterResult result;
  FilterReport& rep = result.report;
  std::unordered_set<std::string> seen_ids;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    ++rep.input;
    const std::size_t line = i < line_numbers.size() ? line_numbers[i] : i + 1;
    auto reject = [&](std::size_t& counter, const char* category, std::string reason) {
      ++counter;
      result.rejections.push_back(Rejection{line, category, std::move(reason)});
    };

    Value record;
    try {
      record = normalize_record(parse_json(lines[i]));
    } catch (const ParseError& e) {
      reject(rep.dropped_malformed, "malformed", e.what());
      continue;
    }
    if (!record.is_object()) {
      reject(rep.dropped_malformed, "malformed", "record is not an object");
      continue;
    }
    if (auto why = check_call(record.as_object()); !why.empty()) {
      reject(rep.dropped_bad_call, "bad_call", why);
      continue;
    }
    if (auto why = check_schemas(record.as_object()); !why.empty()) {
      reject(rep.dropped_bad_schema, "bad_schema", why);
      continue;
    }
    Sample s;
    try {
      s = sample_from_value(record);
    } catch (const ParseError& e) {
      reject(rep.dropped_bad_call, "bad_call", e.what());
      continue;
    } catch (const SchemaError& e) {
      reject(rep.dropped_malformed, "malformed", e.what());
      continue;
    }
    if (!seen_ids.insert(s.id).second) {
      reject(rep.dropped_duplicate_id, "duplicate_id", "id \"" + s.id + "\" already kept");
      continue;
    }
    ++rep.kept;
    result.kept.push_back(std::move(s));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Name masking

namespace {

bool has_mask_form(std::string_view name, std::string_view prefix) {
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return false;
  return std::all_of(name.begin() + static_cast<std::ptrdiff_t>(prefix.size()), name.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

struct Lookup {
  std::unordered_map<std::string, std::string> functions;
  std::map<std::pair<std::string, std::string>, std::string> parameters;

  explicit Lookup(const MaskMapping& m) {
    for (const auto& [from, to] : m.functions) functions.emplace(from, to);
    for (const auto& [key, to] : m.parameters) parameters.emplace(key, to);
  }

  std::string function(const std::string& name) const {
    auto it = functions.find(name);
    return it == functions.end() ? name : it->second;
  }

  std::string parameter(const std::string& fn, const std::string& param) const {
    auto it = parameters.find({fn, param});
    return it == parameters.end() ? param : it->second;
  }
};

ToolCall rename_call(const ToolCall& call, const Lookup& lk) {
  ToolCall out;
  out.name = lk.function(call.name);
  for (const auto& m : call.args) out.args.push_back(Member{lk.parameter(call.name, m.key), m.value});
  return out;
}

AnswerSet rename_answer(const AnswerSet& a, const Lookup& lk) {
  AnswerSet out;
  out.direct_response = a.direct_response;
  for (const auto& c : a.calls) out.calls.push_back(rename_call(c, lk));
  return out;
}

ToolSchema rename_schema(const ToolSchema& s, const Lookup& lk) {
  ToolSchema out = s;
  out.name = lk.function(s.name);
  for (auto& [name, spec] : out.parameters) name = lk.parameter(s.name, name);
  return out;
}

std::string rename_text(std::string_view text, const Lookup& lk) {
  auto located = locate_answer(text);
  if (!located) return std::string(text);
  struct Edit {
    Span span;
    std::string replacement;
  };
  std::vector<Edit> edits;
  for (const auto& n : located->names) {
    const ToolCall& c = located->answer.calls[n.call];
    const std::string& from = n.arg ? c.args[*n.arg].key : c.name;
    std::string to = n.arg ? lk.parameter(c.name, from) : lk.function(from);
    if (to == from) continue;
    edits.push_back(Edit{n.span, n.quoted ? quote_json(to) : std::move(to)});
  }
  std::sort(edits.begin(), edits.end(),
            [](const Edit& a, const Edit& b) { return a.span.begin > b.span.begin; });
  std::string out(text);
  for (const auto& e : edits) out.replace(e.span.begin, e.span.end - e.span.begin, e.replacement);
  return out;
}

Sample rename_sample(const Sample& s, const Lookup& lk) {
  Sample out = s;
  for (auto& schema : out.schemas) schema = rename_schema(schema, lk);
  for (auto& turn : out.turns) {
    for (auto& schema : turn.schemas) schema = rename_schema(schema, lk);
    if (turn.calls) turn.calls = rename_answer(*turn.calls, lk);
  }
  out.gt = rename_answer(s.gt, lk);
  if (!s.gt.is_direct_response()) out.gt_text = rename_text(s.gt_text, lk);
  return out;
}

class MappingBuilder {
 public:
  void function(const std::string& name) {
    if (fn_index_.count(name)) return;
    fn_index_.emplace(name, mapping_.functions.size());
    mapping_.functions.emplace_back(name, "func_" + std::to_string(mapping_.functions.size() + 1));
  }

  void parameter(const std::string& fn, const std::string& param) {
    function(fn);
    auto key = std::make_pair(fn, param);
    if (param_seen_.count(key)) return;
    param_seen_.insert(key);
    std::size_t k = ++param_count_[fn];
    mapping_.parameters.emplace_back(std::move(key), "param_" + std::to_string(k));
  }

  void schema(const ToolSchema& s) {
    function(s.name);
    for (const auto& p : s.parameters) parameter(s.name, p.first);
  }

  void answer(const AnswerSet& a) {
    for (const auto& c : a.calls) {
      function(c.name);
      for (const auto& m : c.args) parameter(c.name, m.key);
    }
  }

  MaskMapping take() { return std::move(mapping_); }

 private:
  MaskMapping mapping_;
  std::unordered_map<std::string, std::size_t> fn_index_;
  std::set<std::pair<std::string, std::string>> param_seen_;
  std::unordered_map<std::string, std::size_t> param_count_;
};

}  // namespace

Value MaskMapping::to_value() const {
  Object fns;
  for (const auto& [from, to] : functions) fns.push_back(Member{from, Value(to)});
  Object params;
  for (const auto& [key, to] : parameters) {
    Value* per_fn = find_member(params, key.first);
    if (!per_fn) {
      params.push_back(Member{key.first, Value(Object{})});
      per_fn = &params.back().value;
    }
    per_fn->as_object().push_back(Member{key.second, Value(to)});
  }
  Object o;
  o.push_back(Member{"functions", Value(std::move(fns))});
  o.push_back(Member{"parameters", Value(std::move(params))});
  return Value(std::move(o));
}

MaskMapping MaskMapping::from_value(const Value& v) {
  if (!v.is_object()) throw SchemaError("mask mapping must be an object");
  const Value* fns = find_member(v.as_object(), "functions");
  const Value* params = find_member(v.as_object(), "parameters");
  if (!fns || !fns->is_object() || !params || !params->is_object()) {
    throw SchemaError("mask mapping needs \"functions\" and \"parameters\" objects");
  }
  MaskMapping m;
  std::set<std::string> targets;
  for (const auto& member : fns->as_object()) {
    if (!member.value.is_string()) throw SchemaError("mapped function name must be a string");
    if (!targets.insert(member.value.as_string()).second) {
      throw SchemaError("function mapping is not injective at \"" + member.key + "\"");
    }
    m.functions.emplace_back(member.key, member.value.as_string());
  }
  for (const auto& fn : params->as_object()) {
    if (!fn.value.is_object()) throw SchemaError("parameter mapping entries must be objects");
    std::set<std::string> param_targets;
    for (const auto& p : fn.value.as_object()) {
      if (!p.value.is_string()) throw SchemaError("mapped parameter name must be a string");
      if (!param_targets.insert(p.value.as_string()).second) {
        throw SchemaError("parameter mapping of \"" + fn.key + "\" is not injective");
      }
      m.parameters.emplace_back(std::make_pair(fn.key, p.key), p.value.as_string());
    }
  }
  return m;
}

MaskMapping MaskMapping::inverse() const {
  Lookup lk(*this);
  MaskMapping inv;
  for (const auto& [from, to] : functions) inv.functions.emplace_back(to, from);
  for (const auto& [key, to] : parameters) {
    inv.parameters.emplace_back(std::make_pair(lk.function(key.first), to), key.second);
  }
  return inv;
}

AnswerSet mask_answer(const AnswerSet& answer, const MaskMapping& mapping) {
  return rename_answer(answer, Lookup(mapping));
}

std::string mask_answer_text(std::string_view text, const MaskMapping& mapping) {
  return rename_text(text, Lookup(mapping));
}

MaskResult mask_sample(const Sample& s, MaskOptions options) {
  MappingBuilder b;
  for (const auto& schema : s.schemas) b.schema(schema);
  for (const auto& turn : s.turns) {
    for (const auto& schema : turn.schemas) b.schema(schema);
  }
  b.answer(s.gt);
  for (const auto& turn : s.turns) {
    if (turn.calls) b.answer(*turn.calls);
  }
  MaskMapping mapping = b.take();

  const std::string* collision = nullptr;
  bool identity = true;
  for (const auto& [from, to] : mapping.functions) {
    if (!collision && has_mask_form(from, "func_")) collision = &from;
    identity = identity && from == to;
  }
  for (const auto& [key, to] : mapping.parameters) {
    if (!collision && has_mask_form(key.second, "param_")) collision = &key.second;
    identity = identity && key.second == to;
  }
  if (collision) {
    if (options.idempotent && identity) return MaskResult{s, std::move(mapping)};
    throw MaskCollision("name \"" + *collision + "\" already has the masked form");
  }
  Sample masked = rename_sample(s, Lookup(mapping));
  return MaskResult{std::move(masked), std::move(mapping)};
}

Sample unmask_sample(const Sample& s, const MaskMapping& mapping) {
  return rename_sample(s, Lookup(mapping.inverse()));
}

// ---------------------------------------------------------------------------
// Multi-turn augmentation

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::combine: return "combine";
    case Strategy::tool_removal: return "tool_removal";
    case Strategy::param_clarification: return "param_clarification";
    case Strategy::result_validation: return "result_validation";
  }
  return "combine";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
  for (Strategy st : {Strategy::combine, Strategy::tool_removal, Strategy::param_clarification,
                      Strategy::result_validation}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

namespace {

Turn user_turn(std::string content) {
  Turn t;
  t.role = Role::user;
  t.content = std::move(content);
  return t;
}

Turn assistant_turn(AnswerSet answer) {
  Turn t;
  t.role = Role::assistant;
  if (answer.direct_response) t.content = *answer.direct_response;
  t.calls = std::move(answer);
  return t;
}

const ToolSchema* find_schema(const std::vector<ToolSchema>& schemas, const std::string& name) {
  for (const auto& s : schemas) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void require_single_turn_calls(const Sample& s) {
  if (s.multi_turn) throw StrategyInapplicable("sample is already multi-turn");
  if (!s.gt.has_calls()) throw StrategyInapplicable("reference answer has no tool call");
}

Sample derived(const Sample& s, Strategy strategy, std::uint64_t seed, std::string detail) {
  Sample out = s;
  out.id = s.id + "#" + std::string(to_string(strategy));
  out.multi_turn = true;
  out.provenance = Provenance{std::string(to_string(strategy)), {s.id}, seed, false, std::move(detail)};
  return out;
}

std::size_t last_user_turn(const Sample& s) {
  for (std::size_t i = s.turns.size(); i-- > 0;) {
    if (s.turns[i].role == Role::user) return i;
  }
  throw StrategyInapplicable("sample has no user turn");
}

Sample combine_pair(const Sample& a, const Sample& b, std::uint64_t seed, bool fallback) {
  Sample out;
  out.id = a.id + "+" + b.id;
  out.schemas = a.schemas;
  for (const auto& s : b.schemas) {
    if (!find_schema(out.schemas, s.name)) out.schemas.push_back(s);
  }
  out.turns = a.turns;
  out.turns.push_back(assistant_turn(a.gt));
  out.turns.insert(out.turns.end(), b.turns.begin(), b.turns.end());
  out.gt = b.gt;
  out.gt_text = b.gt_text;
  out.source = a.source == b.source ? a.source : Source::synthetic;
  out.multi_turn = true;
  out.provenance = Provenance{"combine", {a.id, b.id}, seed, fallback, ""};
  return out;
}

bool share_schema(const Sample& a, const Sample& b) {
  for (const auto& s : a.schemas) {
    if (find_schema(b.schemas, s.name)) return true;
  }
  return false;
}

// Text of a scalar value as a user would write it; nullopt when not scalar.
std::optional<std::string> mention_of(const Value& v) {
  if (v.is_string()) return v.as_string();
  if (v.is_number()) return v.as_number().to_string();
  return std::nullopt;
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

struct TokenRange {
  std::size_t begin;
  std::size_t end;
};

std::vector<TokenRange> whitespace_tokens(const std::string& s) {
  std::vector<TokenRange> out;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (i < s.size()) {
    while (i < s.size() && space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !space(s[j])) ++j;
    if (j > i) out.push_back({i, j});
    i = j;
  }
  return out;
}

// Type-preserving alterations of one argument value; empty when none exists.
std::vector<Value> alterations(const Value& v, const std::vector<std::string>& vocab) {
  std::vector<Value> out;
  if (v.is_bool()) {
    out.push_back(Value(!v.as_bool()));
  } else if (v.is_number()) {
    const Decimal& d = v.as_number();
    const double x = d.to_double();
    for (double y : {x + 1.0, x - 1.0, x * 2.0}) {
      if (!std::isfinite(y)) continue;
      Decimal alt = Decimal::from_double(y, d.has_fraction());
      if (!(alt == d)) out.push_back(Value(alt));
    }
  } else if (v.is_string()) {
    const std::string& s = v.as_string();
    for (const auto& tok : whitespace_tokens(s)) {
      const std::string word = s.substr(tok.begin, tok.end - tok.begin);
      for (const auto& w : vocab) {
        if (w == word) continue;
        std::string alt = s;
        alt.replace(tok.begin, tok.end - tok.begin, w);
        out.push_back(Value(std::move(alt)));
        break;  // one replacement word per token position
      }
    }
  }
  return out;
}

}  // namespace

Sample augment_tool_removal(const Sample& s, std::uint64_t seed) {
  require_single_turn_calls(s);
  std::vector<std::string> candidates;
  for (const auto& c : s.gt.calls) {
    if (find_schema(s.schemas, c.name) &&
        std::find(candidates.begin(), candidates.end(), c.name) == candidates.end()) {
      candidates.push_back(c.name);
    }
  }
  if (candidates.empty()) throw StrategyInapplicable("called tool has no schema");
  std::mt19937_64 rng(seed);
  const std::string name = candidates[detail::uniform_index(rng, candidates.size())];

  Sample out = derived(s, Strategy::tool_removal, seed, name);
  const ToolSchema removed = *find_schema(s.schemas, name);
  out.schemas.erase(std::remove_if(out.schemas.begin(), out.schemas.end(),
                                   [&](const ToolSchema& t) { return t.name == name; }),
                    out.schemas.end());
  out.turns.push_back(assistant_turn(AnswerSet::response(
      "The tool " + name + " is not among the available functions, so I cannot complete this "
      "request with the current toolset.")));
  Turn back = user_turn("The tool " + name + " is available now. Please try again.");
  back.schemas.push_back(removed);
  out.turns.push_back(std::move(back));
  return out;
}

Sample augment_param_clarification(const Sample& s, std::uint64_t seed) {
  require_single_turn_calls(s);
  const std::size_t ask = last_user_turn(s);
  const std::string& content = s.turns[ask].content;
  struct Candidate {
    std::string function;
    std::string param;
    std::string mention;
  };
  std::vector<Candidate> candidates;
  for (const auto& c : s.gt.calls) {
    const ToolSchema* schema = find_schema(s.schemas, c.name);
    const bool any_required =
        schema && std::any_of(schema->parameters.begin(), schema->parameters.end(),
                              [](const auto& p) { return p.second.required; });
    for (const auto& m : c.args) {
      if (any_required) {
        const ParamSpec* spec = schema->find_parameter(m.key);
        if (!spec || !spec->required) continue;
      }
      auto mention = mention_of(m.value);
      if (!mention || mention->empty() || content.find(*mention) == std::string::npos) continue;
      candidates.push_back(Candidate{c.name, m.key, std::move(*mention)});
    }
  }
  if (candidates.empty()) {
    throw StrategyInapplicable("no required parameter value is mentioned in the request");
  }
  std::mt19937_64 rng(seed);
  const Candidate& pick = candidates[detail::uniform_index(rng, candidates.size())];

  Sample out = derived(s, Strategy::param_clarification, seed, pick.function + "." + pick.param);
  replace_all(out.turns[ask].content, pick.mention, "___");
  out.turns.push_back(assistant_turn(AnswerSet::response(
      "Could you tell me the value of " + pick.param + " for " + pick.function + "?")));
  out.turns.push_back(user_turn("The " + pick.param + " is " + pick.mention + "."));
  return out;
}

Sample augment_result_validation(const Sample& s, std::uint64_t seed,
                                 const std::vector<std::string>& vocab) {
  require_single_turn_calls(s);
  struct Corruption {
    std::string kind;
    AnswerSet answer;
  };
  std::vector<Corruption> options;
  const auto& calls = s.gt.calls;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    AnswerSet dropped = s.gt;
    dropped.calls.erase(dropped.calls.begin() + static_cast<std::ptrdiff_t>(i));
    options.push_back({"drop_call", std::move(dropped)});
  }
  for (std::size_t i = 0; i < calls.size(); ++i) {
    for (std::size_t j = 0; j < calls[i].args.size(); ++j) {
      AnswerSet deleted = s.gt;
      auto& args = deleted.calls[i].args;
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(j));
      options.push_back({"delete_param", std::move(deleted)});
    }
  }
  for (std::size_t i = 0; i < calls.size(); ++i) {
    for (std::size_t j = 0; j < calls[i].args.size(); ++j) {
      for (auto& alt : alterations(calls[i].args[j].value, vocab)) {
        AnswerSet altered = s.gt;
        altered.calls[i].args[j].value = std::move(alt);
        options.push_back({"alter_value", std::move(altered)});
      }
    }
  }
  // Two-level draw: the corruption class first, then a target inside it.
  std::vector<std::string> kinds;
  for (const auto& o : options) {
    if (std::find(kinds.begin(), kinds.end(), o.kind) == kinds.end()) kinds.push_back(o.kind);
  }
  std::mt19937_64 rng(seed);
  const std::string kind = kinds[detail::uniform_index(rng, kinds.size())];
  std::vector<const Corruption*> of_kind;
  for (const auto& o : options) {
    if (o.kind == kind) of_kind.push_back(&o);
  }
  const Corruption& pick = *of_kind[detail::uniform_index(rng, of_kind.size())];

  Sample out = derived(s, Strategy::result_validation, seed, kind);
  out.turns.push_back(assistant_turn(pick.answer));
  out.turns.push_back(user_turn(
      "That call does not look right for my request. Please check it and answer again."));
  return out;
}

std::vector<std::string> string_vocabulary(const std::vector<Sample>& corpus) {
  std::set<std::string> words;
  std::function<void(const Value&)> visit = [&](const Value& v) {
    if (v.is_string()) {
      const std::string& s = v.as_string();
      for (const auto& t : whitespace_tokens(s)) words.insert(s.substr(t.begin, t.end - t.begin));
    } else if (v.is_list()) {
      for (const auto& e : v.as_list()) visit(e);
    } else if (v.is_object()) {
      for (const auto& m : v.as_object()) visit(m.value);
    }
  };
  for (const auto& s : corpus) {
    for (const auto& c : s.gt.calls) {
      for (const auto& m : c.args) visit(m.value);
    }
  }
  return {words.begin(), words.end()};
}

AugmentResult augment_multi_turn(const std::vector<Sample>& corpus, Strategy strategy,
                                 std::uint64_t seed) {
  AugmentResult result;
  const auto tag = static_cast<std::uint64_t>(strategy) + 1;

  if (strategy == Strategy::combine) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (corpus[i].multi_turn) {
        result.skipped.push_back(Skip{corpus[i].id, "sample is already multi-turn"});
      } else {
        pool.push_back(i);
      }
    }
    std::mt19937_64 rng(detail::mix_seed(seed, tag));
    detail::shuffle(pool, rng);
    std::vector<bool> used(pool.size(), false);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      const Sample& a = corpus[pool[i]];
      std::optional<std::size_t> partner;
      std::optional<std::size_t> fallback;
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        if (used[j]) continue;
        if (!fallback) fallback = j;
        if (share_schema(a, corpus[pool[j]])) {
          partner = j;
          break;
        }
      }
      const bool is_fallback = !partner.has_value();
      if (!partner) partner = fallback;
      if (!partner) {
        result.skipped.push_back(Skip{a.id, "no partner left to combine with"});
        continue;
      }
      used[*partner] = true;
      result.samples.push_back(combine_pair(a, corpus[pool[*partner]], seed, is_fallback));
    }
    return result;
  }

  const std::vector<std::string> vocab =
      strategy == Strategy::result_validation ? string_vocabulary(corpus)
                                              : std::vector<std::string>{};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Sample& s = corpus[i];
    const std::uint64_t local = detail::mix_seed(seed, tag, i);
    try {
      Sample out;
      switch (strategy) {
        case Strategy::tool_removal: out = augment_tool_removal(s, local); break;
        case Strategy::param_clarification: out = augment_param_clarification(s, local); break;
        default: out = augment_result_validation(s, local, vocab); break;
      }
      out.provenance->seed = seed;
      result.samples.push_back(std::move(out));
    } catch (const StrategyInapplicable& e) {
      result.skipped.push_back(Skip{s.id, e.what()});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Statistics

namespace {

constexpr Source kSourceOrder[] = {Source::xlam, Source::toolace, Source::synthetic};

std::size_t source_slot(Source s) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (kSourceOrder[i] == s) return i;
  }
  return 2;
}

}  // namespace

void StatsTable::add_row(std::string label, const std::vector<Sample>& corpus) {
  StatsRow row;
  row.label = std::move(label);
  for (const auto& s : corpus) ++row.counts[source_slot(s.source)][s.multi_turn ? 1 : 0];
  rows.push_back(std::move(row));
}

Value StatsTable::to_value() const {
  List out;
  for (const auto& row : rows) {
    Object o;
    o.push_back(Member{"stage", Value(row.label)});
    for (std::size_t i = 0; i < 3; ++i) {
      Object per;
      per.push_back(Member{"single_turn", count(row.counts[i][0])});
      per.push_back(Member{"multi_turn", count(row.counts[i][1])});
      o.push_back(Member{std::string(to_string(kSourceOrder[i])), Value(std::move(per))});
    }
    out.push_back(Value(std::move(o)));
  }
  return Value(std::move(out));
}

std::string StatsTable::to_text() const {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"stage"};
  for (Source s : kSourceOrder) {
    header.push_back(std::string(to_string(s)) + " single");
    header.push_back(std::string(to_string(s)) + " multi");
  }
  grid.push_back(header);
  for (const auto& row : rows) {
    std::vector<std::string> line{row.label};
    for (const auto& per : row.counts) {
      line.push_back(std::to_string(per[0]));
      line.push_back(std::to_string(per[1]));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::string out;
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) out += "  ";
      out += c == 0 ? pad_right(line[c], width[c]) : pad_left(line[c], width[c]);
    }
    out += "\n";
  }
  return out;
}

StatsTable corpus_stats(const std::vector<Sample>& corpus) {
  std::vector<Sample> raw;
  std::vector<Sample> augmented;
  for (const auto& s : corpus) (s.provenance ? augmented : raw).push_back(s);
  StatsTable t;
  t.add_row("Raw Data", raw);
  t.add_row("Multi-Aug.", augmented);
  t.add_row("After", corpus);
  return t;
}

}  // namespace tcrl
