#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcrl/json_value.hpp"
#include "tcrl/value.hpp"

namespace tcrl {

/// One invocation `name(arg=value, ...)`. Argument names are unique and keep
/// the order they were written in.
struct ToolCall {
  std::string name;
  Object args;
};

/// A model's (or the reference) answer for one turn: either a list of calls,
/// a direct natural-language response, or neither ("no action").
struct AnswerSet {
  std::vector<ToolCall> calls;
  std::optional<std::string> direct_response;

  static AnswerSet response(std::string text) {
    AnswerSet a;
    a.direct_response = std::move(text);
    return a;
  }

  bool has_calls() const noexcept { return !calls.empty(); }
  bool is_direct_response() const noexcept { return direct_response.has_value(); }
};

/// Raw completion split into its `<think>` / `<answer>` segments.
struct StructuredResponse {
  std::string raw;
  std::optional<std::string> think;
  std::optional<std::string> answer;
  std::optional<AnswerSet> parsed;

  bool well_formed() const noexcept { return think.has_value() && answer.has_value(); }
};

struct JsonCallOptions {
  /// Treat a call object without "arguments"/"parameters" as having none.
  bool lenient_arguments = false;
};

/// `[f(a=1, b="x"), g()]`. Throws ParseError; never returns partial results.
AnswerSet parse_call_expression(std::string_view text);

/// `{"name": ..., "arguments": {...}}` or an array of such objects.
/// "parameters" is accepted as an alias of "arguments". Throws ParseError.
AnswerSet parse_json_calls(std::string_view text, JsonCallOptions options = {});

/// Bracketed syntax first, then JSON; nullopt when neither parses.
std::optional<AnswerSet> try_parse_answer(std::string_view text);

/// Tag segments are extracted only when each of the four tags occurs exactly
/// once, ordered think-open < think-close < answer-open < answer-close.
StructuredResponse parse_structured_response(std::string_view raw);

/// Canonical text: double quotes, `, ` separators, `=` without spaces,
/// Python-style True/False/None, arguments in stored order.
std::string print_call_expression(const AnswerSet& answer);
std::string print_value(const Value& value);

/// `<think>{think}</think><answer>{answer}</answer>`.
std::string wrap_response(std::string_view think, std::string_view answer);

/// Where a function or argument name sits in the source text.
struct NameSpan {
  std::size_t call = 0;
  std::optional<std::size_t> arg;  // nullopt for the function name
  Span span;
  bool quoted = false;  // JSON string literal rather than a bare identifier
};

struct LocatedAnswer {
  AnswerSet answer;
  std::vector<NameSpan> names;
};

/// Same precedence as try_parse_answer, but also reports name locations.
std::optional<LocatedAnswer> locate_answer(std::string_view text);

/// Structural equality of call values (numbers numerically, lists ordered,
/// maps unordered, strings exact).
bool calls_equal(const ToolCall& a, const ToolCall& b);

/// AnswerSet <-> JSON object {"calls": [{"name", "arguments"}...]} or
/// {"direct_response": "..."}.
Value answer_to_value(const AnswerSet& answer);
AnswerSet answer_from_value(const Value& value);

}  // namespace tcrl
