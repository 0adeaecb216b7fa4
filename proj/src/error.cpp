#include "rankaudit/error.hpp"

namespace rankaudit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::ResourceLimit: return "resource-limit";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace rankaudit
