#include "qlock/error.hpp"

namespace qlock {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidQubit: return "InvalidQubit";
    case ErrorCode::DuplicateQubit: return "DuplicateQubit";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::MeasurementPresent: return "MeasurementPresent";
    case ErrorCode::MeasurementNotLast: return "MeasurementNotLast";
    case ErrorCode::QubitCountMismatch: return "QubitCountMismatch";
    case ErrorCode::TooFewGates: return "TooFewGates";
    case ErrorCode::NoMeasurement: return "NoMeasurement";
    case ErrorCode::TooManyQubits: return "TooManyQubits";
    case ErrorCode::ZeroShots: return "ZeroShots";
    case ErrorCode::ShotMismatch: return "ShotMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::TooManyVirtualQubits: return "TooManyVirtualQubits";
    case ErrorCode::DisconnectedMap: return "DisconnectedMap";
    case ErrorCode::UnexpectedGate: return "UnexpectedGate";
    case ErrorCode::InfeasibleArity: return "InfeasibleArity";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::UnknownBenchmark: return "UnknownBenchmark";
    case ErrorCode::MissingBarrierTag: return "MissingBarrierTag";
    case ErrorCode::RecordMismatch: return "RecordMismatch";
    case ErrorCode::NoBarrier: return "NoBarrier";
    case ErrorCode::BadScenario: return "BadScenario";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace qlock
