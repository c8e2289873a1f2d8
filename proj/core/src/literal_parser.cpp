#include "literal_parser.hpp"

#include "tcrl/errors.hpp"

namespace tcrl::detail {

namespace {

bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '.';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  for (char c : s) {
    if (!is_ident_char(c)) return false;
  }
  return true;
}

void LiteralParser::fail(std::string expected) const {
  throw ParseError(pos_, std::move(expected));
}

void LiteralParser::skip_ws() {
  while (!at_end()) {
    char c = text_[pos_];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++pos_;
    } else {
      break;
    }
  }
}

bool LiteralParser::consume(char c) {
  if (!at_end() && text_[pos_] == c) {
    ++pos_;
    return true;
  }
  return false;
}

void LiteralParser::expect(char c, const char* what) {
  if (!consume(c)) fail(what);
}

std::string LiteralParser::parse_identifier() {
  std::size_t begin = pos_;
  if (at_end() || !is_ident_start(text_[pos_])) fail("identifier");
  while (!at_end() && is_ident_char(text_[pos_])) ++pos_;
  return std::string(text_.substr(begin, pos_ - begin));
}

Value LiteralParser::parse_value(SpanNode* node, int depth) {
  if (depth > kMaxDepth) fail("shallower nesting");
  std::size_t begin = pos_;
  Value out;
  char c = peek();
  if (c == '"' || (c == '\'' && dialect_ == Dialect::python)) {
    out = Value(parse_string());
  } else if (c == '[') {
    out = parse_list(node, depth);
  } else if (c == '{') {
    out = parse_object(node, depth);
  } else if (c == '-' || is_digit(c) || (c == '+' && dialect_ == Dialect::python)) {
    out = parse_number();
  } else if (is_ident_start(c)) {
    out = parse_word();
  } else {
    fail("value");
  }
  if (node != nullptr) node->span = Span{begin, pos_};
  return out;
}

Value LiteralParser::parse_number() {
  std::size_t begin = pos_;
  if (peek() == '-' || peek() == '+') ++pos_;
  std::size_t int_begin = pos_;
  while (is_digit(peek())) ++pos_;
  if (pos_ == int_begin) fail("digit");
  if (dialect_ == Dialect::json && pos_ - int_begin > 1 && text_[int_begin] == '0') {
    pos_ = int_begin + 1;
    fail("no leading zeros");
  }
  if (peek() == '.') {
    ++pos_;
    std::size_t frac_begin = pos_;
    while (is_digit(peek())) ++pos_;
    if (pos_ == frac_begin) fail("fraction digit");
  }
  if (peek() == 'e' || peek() == 'E') {
    ++pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    std::size_t exp_begin = pos_;
    while (is_digit(peek())) ++pos_;
    if (pos_ == exp_begin) fail("exponent digit");
  }
  auto decimal = Decimal::from_text(text_.substr(begin, pos_ - begin));
  if (!decimal) {
    pos_ = begin;
    fail("number within exponent range");
  }
  return Value(std::move(*decimal));
}

Value LiteralParser::parse_word() {
  std::size_t begin = pos_;
  while (!at_end() && is_ident_start(text_[pos_])) ++pos_;
  std::string_view word = text_.substr(begin, pos_ - begin);
  if (word == "true") return Value(true);
  if (word == "false") return Value(false);
  if (word == "null") return Value(Null{});
  if (dialect_ == Dialect::python) {
    if (word == "True") return Value(true);
    if (word == "False") return Value(false);
    if (word == "None") return Value(Null{});
  }
  pos_ = begin;
  fail(dialect_ == Dialect::python ? "literal (True, False, None, true, false, null)"
                                   : "literal (true, false, null)");
}

Value LiteralParser::parse_list(SpanNode* node, int depth) {
  expect('[', "'['");
  List items;
  skip_ws();
  if (consume(']')) return Value(std::move(items));
  while (true) {
    skip_ws();
    SpanNode* child = nullptr;
    if (node != nullptr) child = &node->children.emplace_back();
    items.push_back(parse_value(child, depth + 1));
    skip_ws();
    if (consume(']')) break;
    expect(',', "',' or ']'");
  }
  return Value(std::move(items));
}

Value LiteralParser::parse_object(SpanNode* node, int depth) {
  expect('{', "'{'");
  Object members;
  skip_ws();
  if (consume('}')) return Value(std::move(members));
  while (true) {
    skip_ws();
    std::size_t key_begin = pos_;
    char q = peek();
    if (!(q == '"' || (q == '\'' && dialect_ == Dialect::python))) fail("string key");
    std::string key = parse_string();
    if (find_member(members, key) != nullptr) {
      pos_ = key_begin;
      fail("unique object key (duplicate \"" + key + "\")");
    }
    if (node != nullptr) node->keys.push_back(Span{key_begin, pos_});
    skip_ws();
    expect(':', "':'");
    skip_ws();
    SpanNode* child = nullptr;
    if (node != nullptr) child = &node->children.emplace_back();
    Value v = parse_value(child, depth + 1);
    members.push_back(Member{std::move(key), std::move(v)});
    skip_ws();
    if (consume('}')) break;
    expect(',', "',' or '}'");
  }
  return Value(std::move(members));
}

unsigned LiteralParser::parse_hex4() {
  unsigned v = 0;
  for (int i = 0; i < 4; ++i) {
    char c = peek();
    unsigned digit = 0;
    if (c >= '0' && c <= '9') {
      digit = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      digit = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      digit = static_cast<unsigned>(c - 'A' + 10);
    } else {
      fail("hex digit");
    }
    v = v * 16 + digit;
    ++pos_;
  }
  return v;
}

void LiteralParser::append_utf8(std::string& out, unsigned cp) const {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string LiteralParser::parse_string() {
  char quote = peek();
  if (quote != '"' && !(quote == '\'' && dialect_ == Dialect::python)) fail("string");
  ++pos_;
  std::string out;
  while (true) {
    if (at_end()) fail("closing quote");
    char c = text_[pos_];
    if (c == quote) {
      ++pos_;
      return out;
    }
    if (c == '\\') {
      ++pos_;
      if (at_end()) fail("escape sequence");
      char e = text_[pos_];
      if (dialect_ == Dialect::python) {
        switch (e) {
          case '\\': out.push_back('\\'); break;
          case '\'': out.push_back('\''); break;
          case '"': out.push_back('"'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: fail("escape sequence (\\\\ \\' \\\" \\n \\t)");
        }
        ++pos_;
        continue;
      }
      ++pos_;
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case '/': out.push_back('/'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        case 'u': {
          unsigned cp = parse_hex4();
          if (cp >= 0xD800 && cp <= 0xDBFF) {
            if (!(consume('\\') && consume('u'))) fail("low surrogate escape");
            unsigned low = parse_hex4();
            if (low < 0xDC00 || low > 0xDFFF) fail("low surrogate");
            cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
          } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
            fail("high surrogate before low surrogate");
          }
          append_utf8(out, cp);
          break;
        }
        default:
          --pos_;
          fail("JSON escape sequence");
      }
      continue;
    }
    if (dialect_ == Dialect::json && static_cast<unsigned char>(c) < 0x20) {
      fail("escaped control character");
    }
    out.push_back(c);
    ++pos_;
  }
}

}  // namespace tcrl::detail

namespace tcrl {

Value parse_json(std::string_view text, SpanNode* spans) {
  detail::LiteralParser p(text, detail::Dialect::json);
  p.skip_ws();
  Value v = p.parse_value(spans);
  p.skip_ws();
  if (!p.at_end()) p.fail("end of input");
  return v;
}

std::string quote_json(std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (u < 0x20) {
          out += "\\u00";
          out.push_back(kHex[u >> 4]);
          out.push_back(kHex[u & 0xF]);
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

namespace {

void dump_into(std::string& out, const Value& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          out += x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Decimal>) {
          out += x.to_string();
        } else if constexpr (std::is_same_v<T, std::string>) {
          out += quote_json(x);
        } else if constexpr (std::is_same_v<T, List>) {
          out.push_back('[');
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i > 0) out.push_back(',');
            dump_into(out, x[i]);
          }
          out.push_back(']');
        } else {
          out.push_back('{');
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i > 0) out.push_back(',');
            out += quote_json(x[i].key);
            out.push_back(':');
            dump_into(out, x[i].value);
          }
          out.push_back('}');
        }
      },
      v.storage());
}

}  // namespace

std::string dump_json(const Value& value) {
  std::string out;
  dump_into(out, value);
  return out;
}

}  // namespace tcrl
