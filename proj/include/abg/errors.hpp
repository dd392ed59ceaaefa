#pragma once

#include <stdexcept>
#include <string>

namespace abg {

/// Error categories. The CLI maps these onto its exit codes.
enum class ErrorKind {
  Argument,        // malformed input to an operation
  Parse,           // text syntax errors (expressions, triples, config files)
  Domain,          // value outside a function's domain (e.g. inverse below cap)
  Size,            // node or series budget exceeded
  TowerOverflow,   // exp of a value whose real part is not representable
  NonPositiveRealPart,
  Reliability,     // series evaluated beyond its guard radius
  Estimation,      // not enough valid samples for a limsup estimate
  Precondition,    // documented precondition not met by measured data
  OutOfRegime,     // integrand or bound outside the representable regime
  Setup,           // scenario parameters rejected at construction
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class TowerOverflow : public Error {
 public:
  TowerOverflow(double logmag, const std::string& where)
      : Error(ErrorKind::TowerOverflow,
              "tower overflow: exp of value with log-magnitude " +
                  std::to_string(logmag) + (where.empty() ? "" : " in " + where)),
        logmag_(logmag) {}
  double logmag() const noexcept { return logmag_; }

 private:
  double logmag_;
};

class ReliabilityError : public Error {
 public:
  ReliabilityError(double requested, double guard)
      : Error(ErrorKind::Reliability,
              "series evaluated at |z| = " + std::to_string(requested) +
                  " beyond its reliable radius " + std::to_string(guard)),
        guard_(guard) {}
  double guard_radius() const noexcept { return guard_; }

 private:
  double guard_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace abg
