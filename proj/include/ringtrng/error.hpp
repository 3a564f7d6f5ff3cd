#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ringtrng {

enum class ErrorKind {
  EmptySequence,
  MalformedBit,
  LengthMismatch,
  WindowTooSmall,
  WindowExceedsSequence,
  BudgetExceeded,
  TooShort,
  Undefined,
  PreconditionFailed,
  MalformedCounter,
  IoError,
  EmptyGrid,
  DegenerateInput,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports. `position` carries the 1-based offending
// character/line number for parse errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(what), kind_(kind), position_(position) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> position_;
};

}  // namespace ringtrng
