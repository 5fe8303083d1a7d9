#include "folio/error.hpp"

namespace folio {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kDuplicateKey: return "duplicate-key";
    case ErrorKind::kData: return "data";
    case ErrorKind::kSplit: return "split";
    case ErrorKind::kWindow: return "window";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kDegenerateMask: return "degenerate-mask";
    case ErrorKind::kFeasibility: return "feasibility";
    case ErrorKind::kAction: return "action";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kRollout: return "rollout";
    case ErrorKind::kVersion: return "version";
    case ErrorKind::kRange: return "range";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kLeakage: return "leakage";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace folio
