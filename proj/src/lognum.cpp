#include "abg/lognum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "abg/errors.hpp"

namespace abg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// cos/sin that are exact at multiples of pi, so real-valued arithmetic in
// log form cancels exactly.
std::complex<double> unit_of(double angle) {
  if (angle == 0.0) return {1.0, 0.0};
  const double a = std::abs(angle);
  if (a == kPi) return {-1.0, 0.0};
  if (a == kTwoPi) return {1.0, 0.0};
  return {std::cos(angle), std::sin(angle)};
}

struct Mantissa {
  std::complex<double> sum;
  double abs_sum;
};

Mantissa pairwise(std::span<const LogComplex> terms, double shift) {
  if (terms.size() <= 8) {
    Mantissa m{{0.0, 0.0}, 0.0};
    for (const auto& t : terms) {
      if (t.is_zero()) continue;
      const double w = std::exp(t.logmag - shift);
      m.sum += w * unit_of(t.phase);
      m.abs_sum += w;
    }
    return m;
  }
  const std::size_t mid = terms.size() / 2;
  const Mantissa lo = pairwise(terms.first(mid), shift);
  const Mantissa hi = pairwise(terms.subspan(mid), shift);
  return {lo.sum + hi.sum, lo.abs_sum + hi.abs_sum};
}

}  // namespace

double wrap_phase(double phase) {
  double r = std::remainder(phase, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

LogComplex LogComplex::polar_log(double logmag, double phase) {
  return {logmag, wrap_phase(phase), false};
}

LogComplex LogComplex::from_complex(std::complex<double> v) {
  if (v == std::complex<double>(0.0, 0.0)) return zero();
  return polar_log(std::log(std::abs(v)), std::arg(v));
}

LogComplex LogComplex::from_real(double v) {
  if (v == 0.0) return zero();
  return {std::log(std::abs(v)), v > 0 ? 0.0 : kPi, false};
}

std::complex<double> LogComplex::unit() const { return unit_of(phase); }

std::complex<double> LogComplex::to_complex() const {
  if (is_zero()) return {0.0, 0.0};
  return std::exp(logmag) * unit();
}

LogComplex LogComplex::real_part() const {
  if (is_zero()) return zero();
  const double c = unit().real();
  if (c == 0.0) return zero();
  return {logmag + std::log(std::abs(c)), c > 0 ? 0.0 : kPi, cancelled};
}

LogComplex lc_mul(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero() || b.is_zero()) return LogComplex::zero();
  return {a.logmag + b.logmag, wrap_phase(a.phase + b.phase), a.cancelled || b.cancelled};
}

LogComplex lc_add(const LogComplex& a, const LogComplex& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const LogComplex& big = a.logmag >= b.logmag ? a : b;
  const LogComplex& small = a.logmag >= b.logmag ? b : a;
  const double e = std::exp(small.logmag - big.logmag);
  const std::complex<double> u = unit_of(small.phase - big.phase);
  const double wr = 1.0 + e * u.real();
  const double wi = e * u.imag();
  const bool flags = a.cancelled || b.cancelled;
  if (wr == 0.0 && wi == 0.0) {
    LogComplex z = LogComplex::zero();
    z.cancelled = true;
    return z;
  }
  double logw;
  if (e < 0.5) {
    logw = 0.5 * std::log1p(2.0 * e * u.real() + e * e);
  } else {
    logw = std::log(std::hypot(wr, wi));
  }
  const double rel = std::exp(logw) / (1.0 + e);
  LogComplex out{big.logmag + logw, wrap_phase(big.phase + std::atan2(wi, wr)),
                 flags || rel < kCancellationFlag};
  return out;
}

LogComplex lc_neg(const LogComplex& a) {
  if (a.is_zero()) return a;
  return {a.logmag, wrap_phase(a.phase + kPi), a.cancelled};
}

LogComplex lc_pow(const LogComplex& a, double exponent) {
  if (exponent == 0.0) return LogComplex::one();
  if (a.is_zero()) {
    if (exponent > 0) return a;
    fail(ErrorKind::Domain, "negative power of zero");
  }
  return {exponent * a.logmag, wrap_phase(exponent * a.phase), a.cancelled};
}

LogComplex lc_exp(const LogComplex& a) {
  if (a.is_zero()) return LogComplex::one();
  if (a.logmag > kExpInputLimit) throw TowerOverflow(a.logmag, "");
  const double m = std::exp(a.logmag);
  const std::complex<double> u = a.unit();
  return {m * u.real(), wrap_phase(m * u.imag()), a.cancelled};
}

double log_re(const LogComplex& a) {
  const double c = a.unit().real();
  if (c <= 0.0) {
    fail(ErrorKind::NonPositiveRealPart,
         "log_re: real part is not positive (phase " + std::to_string(a.phase) + ")");
  }
  return a.logmag + std::log(c);
}

LogComplex lse_sum(std::span<const LogComplex> terms) {
  double shift = kNegInf;
  bool flags = false;
  for (const auto& t : terms) {
    shift = std::max(shift, t.logmag);
    flags = flags || t.cancelled;
  }
  if (shift == kNegInf) return LogComplex::zero();
  const Mantissa m = pairwise(terms, shift);
  const double mod = std::abs(m.sum);
  if (mod == 0.0) {
    LogComplex z = LogComplex::zero();
    z.cancelled = true;
    return z;
  }
  return {shift + std::log(mod), wrap_phase(std::arg(m.sum)),
          flags || mod / m.abs_sum < kCancellationFlag};
}

std::string to_string(const LogComplex& v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", v.logmag, v.phase);
  return buf;
}

LogModulus LogModulus::from_log_abs(double log_abs) {
  if (log_abs > 0) return {1, std::log(log_abs)};
  if (log_abs < 0) return {-1, std::log(-log_abs)};
  return {0, kNegInf};
}

LogModulus LogModulus::from_real_lc(const LogComplex& v) {
  if (v.is_zero()) return {0, kNegInf};
  return {v.unit().real() > 0 ? 1 : -1, v.logmag};
}

LogModulus LogModulus::of_zero() { return {-1, std::numeric_limits<double>::infinity()}; }

LogComplex LogModulus::as_lc() const {
  if (sign == 0) return LogComplex::zero();
  return {log_of_abs, sign > 0 ? 0.0 : kPi, false};
}

double LogModulus::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_of_abs);
}

double LogModulus::loglog() const { return sign > 0 ? log_of_abs : kNegInf; }

bool LogModulus::is_zero_function_value() const {
  return sign < 0 && log_of_abs == std::numeric_limits<double>::infinity();
}

bool operator<(const LogModulus& a, const LogModulus& b) {
  if (a.sign != b.sign) return a.sign < b.sign;
  if (a.sign > 0) return a.log_of_abs < b.log_of_abs;
  if (a.sign < 0) return a.log_of_abs > b.log_of_abs;
  return false;
}

LogModulus operator+(const LogModulus& a, const LogModulus& b) {
  if (a.is_zero_function_value()) return a;
  if (b.is_zero_function_value()) return b;
  return LogModulus::from_real_lc(lc_add(a.as_lc(), b.as_lc()));
}

LogModulus scale(const LogModulus& a, double factor) {
  if (factor == 0.0 || a.sign == 0) return {0, kNegInf};
  if (factor > 0) return {a.sign, a.log_of_abs + std::log(factor)};
  return {-a.sign, a.log_of_abs + std::log(-factor)};
}

}  // namespace abg
