#include "vrm/common.hpp"

namespace vrm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::GeometryMismatch: return "geometry-mismatch";
    case ErrorCode::DegenerateCamera: return "degenerate-camera";
    case ErrorCode::InsufficientNodes: return "insufficient-nodes";
    case ErrorCode::UnsupportedMetric: return "unsupported-metric";
    case ErrorCode::QueryInCollision: return "query-in-collision";
    case ErrorCode::IsolatedQuery: return "isolated-query";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace vrm
