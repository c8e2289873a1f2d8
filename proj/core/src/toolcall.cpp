#include "tcrl/toolcall.hpp"

#include <algorithm>

#include "literal_parser.hpp"
#include "tcrl/errors.hpp"

namespace tcrl {

namespace {

using detail::Dialect;
using detail::LiteralParser;

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

LocatedAnswer parse_bracketed(std::string_view text) {
  LiteralParser p(text, Dialect::python);
  LocatedAnswer out;
  p.skip_ws();
  p.expect('[', "'['");
  p.skip_ws();
  if (!p.consume(']')) {
    while (true) {
      p.skip_ws();
      std::size_t call_index = out.answer.calls.size();
      std::size_t name_begin = p.pos();
      ToolCall call;
      call.name = p.parse_identifier();
      out.names.push_back(NameSpan{call_index, std::nullopt, Span{name_begin, p.pos()}, false});
      p.skip_ws();
      p.expect('(', "'('");
      p.skip_ws();
      if (!p.consume(')')) {
        while (true) {
          p.skip_ws();
          std::size_t arg_begin = p.pos();
          std::string arg = p.parse_identifier();
          if (find_member(call.args, arg) != nullptr) {
            throw ParseError(arg_begin, "unique argument name (duplicate '" + arg + "')");
          }
          out.names.push_back(
              NameSpan{call_index, call.args.size(), Span{arg_begin, p.pos()}, false});
          p.skip_ws();
          p.expect('=', "'='");
          p.skip_ws();
          Value v = p.parse_value(nullptr, 1);
          call.args.push_back(Member{std::move(arg), std::move(v)});
          p.skip_ws();
          if (p.consume(')')) break;
          p.expect(',', "',' or ')'");
        }
      }
      out.answer.calls.push_back(std::move(call));
      p.skip_ws();
      if (p.consume(']')) break;
      p.expect(',', "',' or ']'");
    }
  }
  p.skip_ws();
  if (!p.at_end()) p.fail("end of input");
  return out;
}

std::size_t member_index(const Object& o, std::string_view key) {
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (o[i].key == key) return i;
  }
  return o.size();
}

ToolCall call_from_value(const Value& v, const SpanNode* node, std::size_t call_index,
                         JsonCallOptions options, std::vector<NameSpan>* names) {
  std::size_t where = node != nullptr ? node->span.begin : 0;
  if (!v.is_object()) throw ParseError(where, "call object");
  const Object& obj = v.as_object();
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const auto& key = obj[i].key;
    if (key != "name" && key != "arguments" && key != "parameters") {
      throw ParseError(node != nullptr ? node->keys[i].begin : 0,
                       "one of \"name\", \"arguments\", \"parameters\" (got \"" + key + "\")");
    }
  }
  std::size_t name_idx = member_index(obj, "name");
  if (name_idx == obj.size()) throw ParseError(where, "\"name\" member");
  const Value& name = obj[name_idx].value;
  std::size_t name_pos = node != nullptr ? node->children[name_idx].span.begin : 0;
  if (!name.is_string() || !detail::is_identifier(name.as_string())) {
    throw ParseError(name_pos, "identifier string for \"name\"");
  }

  std::size_t args_idx = member_index(obj, "arguments");
  std::size_t alias_idx = member_index(obj, "parameters");
  if (args_idx != obj.size() && alias_idx != obj.size()) {
    throw ParseError(node != nullptr ? node->keys[alias_idx].begin : 0,
                     "only one of \"arguments\" and \"parameters\"");
  }
  if (args_idx == obj.size()) args_idx = alias_idx;

  ToolCall call;
  call.name = name.as_string();
  if (names != nullptr) {
    names->push_back(NameSpan{call_index, std::nullopt, node->children[name_idx].span, true});
  }
  if (args_idx == obj.size()) {
    if (!options.lenient_arguments) throw ParseError(where, "\"arguments\" member");
    return call;
  }
  const Value& args = obj[args_idx].value;
  if (!args.is_object()) {
    throw ParseError(node != nullptr ? node->children[args_idx].span.begin : 0,
                     "object for \"arguments\"");
  }
  const Object& arg_obj = args.as_object();
  for (std::size_t j = 0; j < arg_obj.size(); ++j) {
    if (!detail::is_identifier(arg_obj[j].key)) {
      throw ParseError(node != nullptr ? node->children[args_idx].keys[j].begin : 0,
                       "identifier argument name");
    }
    if (names != nullptr) {
      names->push_back(NameSpan{call_index, j, node->children[args_idx].keys[j], true});
    }
  }
  call.args = arg_obj;
  return call;
}

LocatedAnswer parse_json_located(std::string_view text, JsonCallOptions options) {
  SpanNode root;
  Value v = parse_json(text, &root);
  LocatedAnswer out;
  if (v.is_list()) {
    const List& items = v.as_list();
    for (std::size_t i = 0; i < items.size(); ++i) {
      out.answer.calls.push_back(
          call_from_value(items[i], &root.children[i], i, options, &out.names));
    }
  } else if (v.is_object()) {
    out.answer.calls.push_back(call_from_value(v, &root, 0, options, &out.names));
  } else {
    throw ParseError(root.span.begin, "call object or array of call objects");
  }
  return out;
}

void print_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
}

void print_into(std::string& out, const Value& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>) {
          out += "None";
        } else if constexpr (std::is_same_v<T, bool>) {
          out += x ? "True" : "False";
        } else if constexpr (std::is_same_v<T, Decimal>) {
          out += x.to_string();
        } else if constexpr (std::is_same_v<T, std::string>) {
          print_string(out, x);
        } else if constexpr (std::is_same_v<T, List>) {
          out.push_back('[');
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i > 0) out += ", ";
            print_into(out, x[i]);
          }
          out.push_back(']');
        } else {
          out.push_back('{');
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i > 0) out += ", ";
            print_string(out, x[i].key);
            out += ": ";
            print_into(out, x[i].value);
          }
          out.push_back('}');
        }
      },
      v.storage());
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle,
                              std::size_t& first) {
  std::size_t count = 0;
  first = std::string_view::npos;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + 1)) {
    if (count == 0) first = pos;
    ++count;
  }
  return count;
}

}  // namespace

AnswerSet parse_call_expression(std::string_view text) {
  return parse_bracketed(text).answer;
}

AnswerSet parse_json_calls(std::string_view text, JsonCallOptions options) {
  return parse_json_located(text, options).answer;
}

std::optional<AnswerSet> try_parse_answer(std::string_view text) {
  if (auto located = locate_answer(text)) return std::move(located->answer);
  return std::nullopt;
}

std::optional<LocatedAnswer> locate_answer(std::string_view text) {
  try {
    return parse_bracketed(text);
  } catch (const ParseError&) {
  }
  try {
    return parse_json_located(text, {});
  } catch (const ParseError&) {
  }
  return std::nullopt;
}

StructuredResponse parse_structured_response(std::string_view raw) {
  StructuredResponse out;
  out.raw = std::string(raw);
  std::size_t p1 = 0;
  std::size_t p2 = 0;
  std::size_t p3 = 0;
  std::size_t p4 = 0;
  if (count_occurrences(raw, kThinkOpen, p1) != 1 || count_occurrences(raw, kThinkClose, p2) != 1 ||
      count_occurrences(raw, kAnswerOpen, p3) != 1 ||
      count_occurrences(raw, kAnswerClose, p4) != 1) {
    return out;
  }
  if (!(p1 + kThinkOpen.size() <= p2 && p2 + kThinkClose.size() <= p3 &&
        p3 + kAnswerOpen.size() <= p4)) {
    return out;
  }
  std::size_t think_begin = p1 + kThinkOpen.size();
  std::size_t answer_begin = p3 + kAnswerOpen.size();
  out.think = std::string(raw.substr(think_begin, p2 - think_begin));
  out.answer = std::string(raw.substr(answer_begin, p4 - answer_begin));
  out.parsed = try_parse_answer(*out.answer);
  return out;
}

std::string print_value(const Value& value) {
  std::string out;
  print_into(out, value);
  return out;
}

std::string print_call_expression(const AnswerSet& answer) {
  if (answer.direct_response) return *answer.direct_response;
  std::string out = "[";
  for (std::size_t i = 0; i < answer.calls.size(); ++i) {
    if (i > 0) out += ", ";
    const ToolCall& call = answer.calls[i];
    out += call.name;
    out.push_back('(');
    for (std::size_t j = 0; j < call.args.size(); ++j) {
      if (j > 0) out += ", ";
      out += call.args[j].key;
      out.push_back('=');
      print_into(out, call.args[j].value);
    }
    out.push_back(')');
  }
  out.push_back(']');
  return out;
}

std::string wrap_response(std::string_view think, std::string_view answer) {
  std::string out;
  out.reserve(think.size() + answer.size() + 32);
  out += kThinkOpen;
  out += think;
  out += kThinkClose;
  out += kAnswerOpen;
  out += answer;
  out += kAnswerClose;
  return out;
}

bool calls_equal(const ToolCall& a, const ToolCall& b) {
  return a.name == b.name && objects_equal(a.args, b.args);
}

Value answer_to_value(const AnswerSet& answer) {
  Object out;
  if (answer.direct_response) {
    out.push_back(Member{"direct_response", Value(*answer.direct_response)});
    return Value(std::move(out));
  }
  List calls;
  for (const auto& call : answer.calls) {
    Object c;
    c.push_back(Member{"name", Value(call.name)});
    c.push_back(Member{"arguments", Value(call.args)});
    calls.push_back(Value(std::move(c)));
  }
  out.push_back(Member{"calls", Value(std::move(calls))});
  return Value(std::move(out));
}

AnswerSet answer_from_value(const Value& value) {
  if (!value.is_object()) throw ParseError(0, "answer object");
  AnswerSet out;
  for (const auto& m : value.as_object()) {
    if (m.key == "calls") {
      if (!m.value.is_list()) throw ParseError(0, "array for \"calls\"");
      const List& items = m.value.as_list();
      for (std::size_t i = 0; i < items.size(); ++i) {
        out.calls.push_back(call_from_value(items[i], nullptr, i, {}, nullptr));
      }
    } else if (m.key == "direct_response") {
      if (m.value.is_null()) continue;
      if (!m.value.is_string()) throw ParseError(0, "string for \"direct_response\"");
      out.direct_response = m.value.as_string();
    } else {
      throw ParseError(0, "\"calls\" or \"direct_response\" (got \"" + m.key + "\")");
    }
  }
  if (out.direct_response && !out.calls.empty()) {
    throw ParseError(0, "either calls or a direct response, not both");
  }
  return out;
}

}  // namespace tcrl
