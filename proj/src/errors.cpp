#include "psm/errors.hpp"

namespace psm {

const char* to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::input: return "input";
    case ErrorCategory::estimation: return "estimation";
    case ErrorCategory::matching: return "matching";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

}  // namespace psm
