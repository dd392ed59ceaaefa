#pragma once

#include <complex>
#include <limits>
#include <span>
#include <string>

namespace abg {

/// Nonzero complex value stored as (log|v|, arg v). logmag = -inf is the exact
/// zero. Magnitudes up to exp(DBL_MAX) are representable; nothing is ever
/// materialized unless a caller asks for to_complex().
struct LogComplex {
  double logmag = -std::numeric_limits<double>::infinity();
  double phase = 0.0;  // canonical in (-pi, pi]
  // Set when the value came out of an addition whose relative mantissa fell
  // below 1e-14; residual checks use it to tell identities from noise.
  bool cancelled = false;

  static LogComplex zero() { return {}; }
  static LogComplex one() { return {0.0, 0.0, false}; }
  static LogComplex polar_log(double logmag, double phase);
  static LogComplex from_complex(std::complex<double> v);
  static LogComplex from_real(double v);

  bool is_zero() const { return logmag == -std::numeric_limits<double>::infinity(); }
  std::complex<double> to_complex() const;
  std::complex<double> unit() const;  // e^{i phase}, exact on the real axis

  /// Re(v) as a real-valued LogComplex (phase 0 or pi).
  LogComplex real_part() const;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
/// Largest log-magnitude accepted by lc_exp.
inline constexpr double kExpInputLimit = 700.0;
inline constexpr double kCancellationFlag = 1e-14;

double wrap_phase(double phase);

LogComplex lc_mul(const LogComplex& a, const LogComplex& b);
LogComplex lc_add(const LogComplex& a, const LogComplex& b);
LogComplex lc_neg(const LogComplex& a);
LogComplex lc_pow(const LogComplex& a, double exponent);
LogComplex lc_exp(const LogComplex& a);
/// log(Re v) without materializing v; throws NonPositiveRealPart if Re v <= 0.
double log_re(const LogComplex& a);
/// Pairwise-tree sum, deterministic for a fixed input order.
LogComplex lse_sum(std::span<const LogComplex> terms);

inline LogComplex operator*(const LogComplex& a, const LogComplex& b) { return lc_mul(a, b); }
inline LogComplex operator+(const LogComplex& a, const LogComplex& b) { return lc_add(a, b); }
inline LogComplex operator-(const LogComplex& a) { return lc_neg(a); }
inline LogComplex operator-(const LogComplex& a, const LogComplex& b) { return lc_add(a, lc_neg(b)); }

std::string to_string(const LogComplex& v);

/// log|f| for values whose logarithm itself may overflow a double: the real
/// number sign * exp(log_of_abs). sign 0 means log|f| = 0; sign -1 with
/// log_of_abs = +inf means f = 0.
struct LogModulus {
  int sign = 0;
  double log_of_abs = -std::numeric_limits<double>::infinity();

  static LogModulus from_log_abs(double log_abs);
  static LogModulus from_real_lc(const LogComplex& v);  // v real-valued
  static LogModulus of_zero();

  LogComplex as_lc() const;
  double value() const;   // log|f| as a double (may be +-inf)
  double loglog() const;  // log(log|f|) when log|f| > 0, else -inf
  bool is_zero_function_value() const;
};

bool operator<(const LogModulus& a, const LogModulus& b);
LogModulus operator+(const LogModulus& a, const LogModulus& b);
LogModulus scale(const LogModulus& a, double factor);

}  // namespace abg
