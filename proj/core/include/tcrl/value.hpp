#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tcrl {

/// Exact decimal number. Equality is numeric (`2 == 2.0 == 20e-1`); the
/// textual shape (fraction present, exponent present) is kept for printing.
class Decimal {
 public:
  Decimal() = default;

  /// Accepts `[+-]?digits(.digits)?([eE][+-]?digits)?`. Returns nullopt on
  /// anything else, including exponents beyond +-1e9.
  static std::optional<Decimal> from_text(std::string_view text);
  static Decimal from_int(std::int64_t v);
  /// Shortest round-trip form of a finite double. `keep_fraction` forces a
  /// `.0` suffix on integral results.
  static Decimal from_double(double v, bool keep_fraction);

  std::string to_string() const;
  double to_double() const;

  bool is_zero() const noexcept { return significand_.empty(); }
  bool has_fraction() const noexcept { return has_fraction_; }
  bool negative() const noexcept { return negative_ && !is_zero(); }

  friend bool operator==(const Decimal& a, const Decimal& b) noexcept {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.negative_ == b.negative_ && a.exponent_ == b.exponent_ &&
           a.significand_ == b.significand_;
  }

 private:
  // value = (-1)^negative * significand * 10^exponent, significand without
  // leading or trailing zeros (empty means zero).
  bool negative_ = false;
  std::string significand_;
  std::int64_t exponent_ = 0;

  // printing shape
  std::string int_digits_ = "0";
  std::string frac_digits_;
  bool has_fraction_ = false;
  bool has_exponent_ = false;
  std::int64_t written_exponent_ = 0;
};

struct Null {
  friend bool operator==(Null, Null) noexcept { return true; }
};

class Value;
struct Member;
using List = std::vector<Value>;
/// Insertion-ordered map with unique keys; compared without regard to order.
using Object = std::vector<Member>;

class Value {
 public:
  using Storage = std::variant<Null, bool, Decimal, std::string, List, Object>;

  Value() = default;
  Value(Null) {}
  Value(bool b) : data_(b) {}
  Value(Decimal d) : data_(std::move(d)) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(List l) : data_(std::move(l)) {}
  Value(Object o) : data_(std::move(o)) {}

  static Value number(std::string_view text);
  static Value integer(std::int64_t v) { return Value(Decimal::from_int(v)); }

  bool is_null() const noexcept { return std::holds_alternative<Null>(data_); }
  bool is_bool() const noexcept { return std::holds_alternative<bool>(data_); }
  bool is_number() const noexcept { return std::holds_alternative<Decimal>(data_); }
  bool is_string() const noexcept { return std::holds_alternative<std::string>(data_); }
  bool is_list() const noexcept { return std::holds_alternative<List>(data_); }
  bool is_object() const noexcept { return std::holds_alternative<Object>(data_); }

  bool as_bool() const { return std::get<bool>(data_); }
  const Decimal& as_number() const { return std::get<Decimal>(data_); }
  const std::string& as_string() const { return std::get<std::string>(data_); }
  const List& as_list() const { return std::get<List>(data_); }
  List& as_list() { return std::get<List>(data_); }
  const Object& as_object() const { return std::get<Object>(data_); }
  Object& as_object() { return std::get<Object>(data_); }

  const Storage& storage() const noexcept { return data_; }

  friend bool operator==(const Value& a, const Value& b);

 private:
  Storage data_;
};

struct Member {
  std::string key;
  Value value;
};

/// Order-free comparison of two objects (same key set, equal values).
bool objects_equal(const Object& a, const Object& b);

const Value* find_member(const Object& object, std::string_view key);
Value* find_member(Object& object, std::string_view key);

/// Sets `key`, replacing an existing member in place or appending.
void set_member(Object& object, std::string key, Value value);

const char* type_name(const Value& v);

}  // namespace tcrl
