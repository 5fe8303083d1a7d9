#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace folio {

/// Failure categories surfaced to the CLI as `error[<category>]: <message>`.
enum class ErrorKind {
  kSchema,
  kEmptyInput,
  kDuplicateKey,
  kData,
  kSplit,
  kWindow,
  kParameter,
  kShape,
  kDegenerateMask,
  kFeasibility,
  kAction,
  kConfig,
  kContract,
  kTraining,
  kRollout,
  kVersion,
  kRange,
  kIo,
  kLeakage,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace folio
