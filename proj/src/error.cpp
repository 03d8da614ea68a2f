#include "autoner/error.hpp"

namespace autoner {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyLine: return "EmptyLine";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::AllLinesEmpty: return "AllLinesEmpty";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::EmptyLatticePosition: return "EmptyLatticePosition";
    case ErrorKind::EmptyAllowedSet: return "EmptyAllowedSet";
    case ErrorKind::BackwardWithoutForward: return "BackwardWithoutForward";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::SupervisionEmpty: return "SupervisionEmpty";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::CheckpointModelKindMismatch: return "CheckpointModelKindMismatch";
    case ErrorKind::BadCheckpoint: return "BadCheckpoint";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace autoner
