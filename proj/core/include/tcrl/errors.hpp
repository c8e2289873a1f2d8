#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcrl {

/// Base of every error raised by the library. `kind()` is the stable error
/// name (e.g. "ParseError") that the CLI and foreign bindings surface.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::string expected)
      : Error("ParseError", "parse error at offset " + std::to_string(position) +
                                ": expected " + expected),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

#define TCRL_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

TCRL_DEFINE_ERROR(SchemaError);
TCRL_DEFINE_ERROR(ConfigError);
TCRL_DEFINE_ERROR(DegenerateGroundTruth);
TCRL_DEFINE_ERROR(GroupTooSmall);
TCRL_DEFINE_ERROR(MissingAdvantages);
TCRL_DEFINE_ERROR(InvalidArgument);
TCRL_DEFINE_ERROR(MaskCollision);
TCRL_DEFINE_ERROR(StrategyInapplicable);
TCRL_DEFINE_ERROR(EmptyToolset);
TCRL_DEFINE_ERROR(IoError);

#undef TCRL_DEFINE_ERROR

}  // namespace tcrl
