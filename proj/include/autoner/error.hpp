#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace autoner {

enum class ErrorKind {
  EmptyLine,
  IoError,
  AllLinesEmpty,
  DimensionMismatch,
  MalformedLine,
  LabelOutOfRange,
  EmptyLatticePosition,
  EmptyAllowedSet,
  BackwardWithoutForward,
  NonFiniteGradient,
  SupervisionEmpty,
  LengthMismatch,
  CheckpointModelKindMismatch,
  BadCheckpoint,
  ConfigError,
};

const char* to_string(ErrorKind kind);

// All library failures surface as this exception. `line` is 1-based and
// zero when the error is not tied to an input line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
};

}  // namespace autoner
