#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sitm {

enum class ErrorKind {
  ExcludedLowFrameRate,
  ExcludedLowQuality,
  PhaseOutOfRange,
  ParseError,
  SchemaError,
  DuplicateParticipant,
  ProjectionUndefined,
  DegenerateLabels,
  ImputationImpossible,
  InputError,
  DegenerateTable,
  ConfigError,
  IOError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the pipeline; `kind()` carries the failure class.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Process exit code for an error kind (2 config, 3 data).
int exit_code_for(ErrorKind kind);

}  // namespace sitm
