#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tcrl/value.hpp"

namespace tcrl {

/// Byte range [begin, end) into the parsed text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Source locations mirroring a parsed Value: `children` has one node per list
/// element or object member, `keys` one span per object key (quotes included).
struct SpanNode {
  Span span;
  std::vector<Span> keys;
  std::vector<SpanNode> children;
};

/// Strict RFC 8259 JSON into a Value. Numbers keep exact decimal form and
/// duplicate object keys are rejected. Throws ParseError.
Value parse_json(std::string_view text, SpanNode* spans = nullptr);

/// Compact JSON (no insignificant whitespace), numbers printed exactly.
std::string dump_json(const Value& value);

/// JSON string literal for `s`, quotes included.
std::string quote_json(std::string_view s);

}  // namespace tcrl
