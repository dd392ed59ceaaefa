#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "abg/lognum.hpp"

namespace abg {

/// Truncated power series with log-space coefficients.
struct LogSeries {
  std::vector<LogComplex> coeffs;
  /// Largest radius where the tail terms stay below 1e-12 of the sum.
  double r_reliable = 0.0;

  std::size_t size() const { return coeffs.size(); }
};

inline constexpr double kTailTolerance = 1e-12;
inline constexpr double kMaxReliableRadius = 1.0 - 1e-12;

/// Tail used by the reliability radius: the last 16 terms, or half the series
/// when it is shorter than 32.
std::size_t tail_length(std::size_t n);
double reliable_radius(const std::vector<LogComplex>& coeffs);

enum class Guard { Enforce, Bypass };

/// j-th derivative of the series at z, termwise.
LogComplex eval_series(const LogSeries& s, std::complex<double> z, int deriv = 0,
                       Guard guard = Guard::Enforce);
LogComplex eval_series_polar(const LogSeries& s, double r, double theta, int deriv = 0,
                             Guard guard = Guard::Enforce);

/// Coefficients split into log-magnitudes and unit phasors, with the nonzero
/// support tracked so sparse factors convolve cheaply.
class LogVec {
 public:
  LogVec() = default;
  explicit LogVec(const std::vector<LogComplex>& v);

  void push(const LogComplex& c);
  std::size_t size() const { return lm_.size(); }
  bool nonzero(std::size_t i) const { return i < lm_.size() && lm_[i] > -kInf; }
  LogComplex at(std::size_t i) const;
  std::vector<LogComplex> to_vector() const;

  /// sum_{m=lo}^{hi} a[n-m] b[m]; out-of-range entries count as zero.
  friend LogComplex conv_at(const LogVec& a, const LogVec& b, std::size_t n, std::size_t lo,
                            std::size_t hi);

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> lm_;
  std::vector<std::complex<double>> u_;
  std::vector<std::size_t> nz_;
};

LogComplex conv_at(const LogVec& a, const LogVec& b, std::size_t n, std::size_t lo,
                   std::size_t hi);

/// Full Cauchy product truncated to n terms.
std::vector<LogComplex> cauchy(const LogVec& a, const LogVec& b, std::size_t n);

}  // namespace abg
