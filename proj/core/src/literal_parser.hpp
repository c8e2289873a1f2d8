#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "tcrl/json_value.hpp"
#include "tcrl/value.hpp"

namespace tcrl::detail {

enum class Dialect {
  python,  // call-expression literals: quote styles, True/None, signed numbers
  json,
};

/// Recursive-descent scanner shared by the call-expression and JSON front
/// ends. Every failure throws ParseError with the offending byte offset.
class LiteralParser {
 public:
  static constexpr int kMaxDepth = 256;

  LiteralParser(std::string_view text, Dialect dialect) : text_(text), dialect_(dialect) {}

  Value parse_value(SpanNode* node = nullptr, int depth = 0);
  std::string parse_string();
  std::string parse_identifier();

  void skip_ws();
  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t pos() const { return pos_; }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  bool consume(char c);
  void expect(char c, const char* what);
  [[noreturn]] void fail(std::string expected) const;

 private:
  Value parse_number();
  Value parse_word();
  Value parse_list(SpanNode* node, int depth);
  Value parse_object(SpanNode* node, int depth);
  void append_utf8(std::string& out, unsigned code_point) const;
  unsigned parse_hex4();

  std::string_view text_;
  Dialect dialect_;
  std::size_t pos_ = 0;
};

bool is_identifier(std::string_view s);

}  // namespace tcrl::detail
