#pragma once

#include <stdexcept>
#include <string>

namespace qlock {

enum class ErrorCode {
  InvalidQubit,
  DuplicateQubit,
  ArityMismatch,
  MeasurementPresent,
  MeasurementNotLast,
  QubitCountMismatch,
  TooFewGates,
  NoMeasurement,
  TooManyQubits,
  ZeroShots,
  ShotMismatch,
  ParseError,
  SchemaVersionMismatch,
  IoError,
  TooManyVirtualQubits,
  DisconnectedMap,
  UnexpectedGate,
  InfeasibleArity,
  EmptyPool,
  UnknownBenchmark,
  MissingBarrierTag,
  RecordMismatch,
  NoBarrier,
  BadScenario,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

// All library failures surface as Error; `code()` identifies the condition so
// callers and tests can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qlock
