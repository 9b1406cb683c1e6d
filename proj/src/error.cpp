#include "sitm/error.hpp"

namespace sitm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ExcludedLowFrameRate: return "ExcludedLowFrameRate";
    case ErrorKind::ExcludedLowQuality: return "ExcludedLowQuality";
    case ErrorKind::PhaseOutOfRange: return "PhaseOutOfRange";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::DuplicateParticipant: return "DuplicateParticipant";
    case ErrorKind::ProjectionUndefined: return "ProjectionUndefined";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::ImputationImpossible: return "ImputationImpossible";
    case ErrorKind::InputError: return "InputError";
    case ErrorKind::DegenerateTable: return "DegenerateTable";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
      return 2;
    default:
      return 3;
  }
}

}  // namespace sitm
