#include "vpsc/errors.hpp"

namespace vpsc {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::frame_length: return "frame_length";
    case ErrorKind::symmetry: return "symmetry";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::counter: return "counter";
    case ErrorKind::clock: return "clock";
    case ErrorKind::phi_violation: return "phi_violation";
    case ErrorKind::key: return "key";
    case ErrorKind::config: return "config";
    case ErrorKind::undefined_metric: return "undefined_metric";
    case ErrorKind::sync_failure: return "sync_failure";
    case ErrorKind::spec: return "spec";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace vpsc
