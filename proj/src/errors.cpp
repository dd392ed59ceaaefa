#include "abg/errors.hpp"

namespace abg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Size: return "size";
    case ErrorKind::TowerOverflow: return "tower-overflow";
    case ErrorKind::NonPositiveRealPart: return "non-positive-real-part";
    case ErrorKind::Reliability: return "reliability";
    case ErrorKind::Estimation: return "estimation";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::OutOfRegime: return "out-of-regime";
    case ErrorKind::Setup: return "setup";
  }
  return "unknown";
}

}  // namespace abg
