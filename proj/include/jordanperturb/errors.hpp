#pragma once

#include <stdexcept>
#include <string>

namespace jordanperturb {

enum class ErrorKind {
  InvalidArgument,
  NonConvergence,
  ClusterSplitFailure,
  SpectraOverlap,
  IndexOutOfRange,
  InvalidTransformation,
  SingularW,
  ClusterNotSeparated,
  MatrixRootFailure,
  NotSimple,
  NotSemisimple,
  SingularNormalizer,
  CardinalityMismatch,
  InsufficientSamples,
  GenerationExhausted,
  UnknownCase,
  ParseError,
  IoError,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace jordanperturb
