#include "tcrl/value.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace tcrl {

namespace {

constexpr std::int64_t kMaxExponent = 1'000'000'000;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string strip_leading_zeros(std::string_view digits) {
  auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return "0";
  return std::string(digits.substr(first));
}

std::string strip_trailing_zeros(std::string_view digits) {
  auto last = digits.find_last_not_of('0');
  if (last == std::string_view::npos) return "0";
  return std::string(digits.substr(0, last + 1));
}

}  // namespace

std::optional<Decimal> Decimal::from_text(std::string_view text) {
  std::size_t i = 0;
  Decimal d;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    d.negative_ = text[i] == '-';
    ++i;
  }
  std::size_t int_begin = i;
  while (i < text.size() && is_digit(text[i])) ++i;
  if (i == int_begin) return std::nullopt;
  std::string_view int_part = text.substr(int_begin, i - int_begin);

  std::string_view frac_part;
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::size_t frac_begin = i;
    while (i < text.size() && is_digit(text[i])) ++i;
    if (i == frac_begin) return std::nullopt;
    frac_part = text.substr(frac_begin, i - frac_begin);
    d.has_fraction_ = true;
  }

  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    std::size_t exp_begin = i;
    std::int64_t exp = 0;
    while (i < text.size() && is_digit(text[i])) {
      exp = exp * 10 + (text[i] - '0');
      if (exp > kMaxExponent) return std::nullopt;
      ++i;
    }
    if (i == exp_begin) return std::nullopt;
    d.has_exponent_ = true;
    d.written_exponent_ = exp_negative ? -exp : exp;
  }
  if (i != text.size()) return std::nullopt;

  d.int_digits_ = strip_leading_zeros(int_part);
  d.frac_digits_ = d.has_fraction_ ? std::string(frac_part) : std::string();

  std::string all(int_part);
  all.append(frac_part);
  std::int64_t exponent = d.written_exponent_ - static_cast<std::int64_t>(frac_part.size());
  auto first = all.find_first_not_of('0');
  if (first == std::string::npos) {
    d.significand_.clear();
    d.exponent_ = 0;
  } else {
    auto last = all.find_last_not_of('0');
    exponent += static_cast<std::int64_t>(all.size() - 1 - last);
    d.significand_ = all.substr(first, last - first + 1);
    d.exponent_ = exponent;
  }
  return d;
}

Decimal Decimal::from_int(std::int64_t v) {
  return *from_text(std::to_string(v));
}

Decimal Decimal::from_double(double v, bool keep_fraction) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite number");
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::invalid_argument("number formatting failed");
  std::string text(buf.data(), end);
  bool integral = text.find_first_of(".eE") == std::string::npos;
  if (integral && keep_fraction) text += ".0";
  auto d = from_text(text);
  if (!d) throw std::invalid_argument("unrepresentable number: " + text);
  return *d;
}

std::string Decimal::to_string() const {
  std::string out;
  if (negative()) out.push_back('-');
  out += int_digits_;
  if (has_fraction_) {
    out.push_back('.');
    out += strip_trailing_zeros(frac_digits_);
  }
  if (has_exponent_) {
    out.push_back('e');
    out += std::to_string(written_exponent_);
  }
  return out;
}

double Decimal::to_double() const {
  if (is_zero()) return negative_ ? -0.0 : 0.0;
  // Scientific form of the exact value keeps from_chars within range limits.
  std::string text = negative_ ? "-" : "";
  text += significand_;
  text += "e";
  text += std::to_string(exponent_);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec == std::errc::result_out_of_range) {
    return exponent_ > 0 ? (negative_ ? -HUGE_VAL : HUGE_VAL) : (negative_ ? -0.0 : 0.0);
  }
  return out;
}

Value Value::number(std::string_view text) {
  auto d = Decimal::from_text(text);
  if (!d) throw std::invalid_argument("invalid number literal: " + std::string(text));
  return Value(std::move(*d));
}

bool objects_equal(const Object& a, const Object& b) {
  if (a.size() != b.size()) return false;
  for (const auto& m : a) {
    const Value* other = find_member(b, m.key);
    if (other == nullptr || !(m.value == *other)) return false;
  }
  return true;
}

bool operator==(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.data_);
        if constexpr (std::is_same_v<T, Object>) {
          return objects_equal(lhs, rhs);
        } else if constexpr (std::is_same_v<T, List>) {
          return std::equal(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(),
                            [](const Value& x, const Value& y) { return x == y; });
        } else {
          return lhs == rhs;
        }
      },
      a.data_);
}

const Value* find_member(const Object& object, std::string_view key) {
  for (const auto& m : object) {
    if (m.key == key) return &m.value;
  }
  return nullptr;
}

Value* find_member(Object& object, std::string_view key) {
  for (auto& m : object) {
    if (m.key == key) return &m.value;
  }
  return nullptr;
}

void set_member(Object& object, std::string key, Value value) {
  if (Value* existing = find_member(object, key)) {
    *existing = std::move(value);
    return;
  }
  object.push_back(Member{std::move(key), std::move(value)});
}

const char* type_name(const Value& v) {
  switch (v.storage().index()) {
    case 0: return "null";
    case 1: return "boolean";
    case 2: return "number";
    case 3: return "string";
    case 4: return "list";
    default: return "object";
  }
}

}  // namespace tcrl
