#include "abg/series.hpp"

#include <algorithm>
#include <cmath>

#include "abg/errors.hpp"

namespace abg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v, std::size_t from) {
  double mx = kNegInf;
  for (std::size_t i = from; i < v.size(); ++i) mx = std::max(mx, v[i]);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) s += std::exp(v[i] - mx);
  return mx + std::log(s);
}

}  // namespace

std::size_t tail_length(std::size_t n) { return n < 32 ? n / 2 : 16; }

double reliable_radius(const std::vector<LogComplex>& coeffs) {
  const std::size_t n = coeffs.size();
  const std::size_t t = tail_length(n);
  if (n == 0 || t == 0) return kMaxReliableRadius;
  const std::size_t head = n - t;
  bool tail_zero = true, head_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!coeffs[i].is_zero()) (i < head ? head_zero : tail_zero) = false;
  }
  if (tail_zero) return kMaxReliableRadius;
  if (head_zero) return 0.0;

  std::vector<double> w(n);
  // log(tail/total) at r = 1 - exp(x)
  auto excess = [&](double x) {
    const double lr = std::log1p(-std::exp(x));
    for (std::size_t i = 0; i < n; ++i) w[i] = coeffs[i].logmag + static_cast<double>(i) * lr;
    return log_sum_exp(w, head) - log_sum_exp(w, 0) - std::log(kTailTolerance);
  };
  const double x_min = std::log(1.0 - kMaxReliableRadius);
  if (excess(x_min) <= 0) return kMaxReliableRadius;
  double good = 0.0, bad = x_min;  // x = 0 is r = 0
  for (int it = 0; it < 200 && good - bad > 1e-13; ++it) {
    const double mid = 0.5 * (good + bad);
    if (excess(mid) <= 0) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  return -std::expm1(good);
}

LogComplex eval_series_polar(const LogSeries& s, double r, double theta, int deriv,
                             Guard guard) {
  if (deriv < 0) fail(ErrorKind::Argument, "negative derivative order");
  if (!(r >= 0 && r < 1)) fail(ErrorKind::Domain, "series evaluated outside the unit disc");
  if (guard == Guard::Enforce && r > s.r_reliable) throw ReliabilityError(r, s.r_reliable);
  const std::size_t j = static_cast<std::size_t>(deriv);
  if (s.size() <= j) return LogComplex::zero();
  std::vector<LogComplex> terms;
  terms.reserve(s.size() - j);
  const double lr = std::log(r);
  for (std::size_t n = j; n < s.size(); ++n) {
    const LogComplex& c = s.coeffs[n];
    if (c.is_zero()) continue;
    const double p = static_cast<double>(n - j);
    double lm = c.logmag + std::lgamma(static_cast<double>(n) + 1) -
                std::lgamma(static_cast<double>(n - j) + 1);
    if (n > j) {
      if (r == 0) continue;
      lm += p * lr;
    }
    terms.push_back(LogComplex::polar_log(lm, c.phase + p * theta));
  }
  return lse_sum(terms);
}

LogComplex eval_series(const LogSeries& s, std::complex<double> z, int deriv, Guard guard) {
  return eval_series_polar(s, std::abs(z), std::arg(z), deriv, guard);
}

LogVec::LogVec(const std::vector<LogComplex>& v) {
  lm_.reserve(v.size());
  u_.reserve(v.size());
  for (const auto& c : v) push(c);
}

void LogVec::push(const LogComplex& c) {
  if (!c.is_zero()) nz_.push_back(lm_.size());
  lm_.push_back(c.logmag);
  u_.push_back(c.is_zero() ? std::complex<double>(0, 0) : c.unit());
}

LogComplex LogVec::at(std::size_t i) const {
  if (!nonzero(i)) return LogComplex::zero();
  return LogComplex::polar_log(lm_[i], std::arg(u_[i]));
}

std::vector<LogComplex> LogVec::to_vector() const {
  std::vector<LogComplex> out(lm_.size());
  for (std::size_t i = 0; i < lm_.size(); ++i) out[i] = at(i);
  return out;
}

LogComplex conv_at(const LogVec& a, const LogVec& b, std::size_t n, std::size_t lo,
                   std::size_t hi) {
  if (a.size() == 0 || b.size() == 0) return LogComplex::zero();
  const std::size_t mlo = std::max(lo, n + 1 > a.size() ? n + 1 - a.size() : std::size_t{0});
  const std::size_t mhi = std::min({hi, n, b.size() - 1});
  if (mlo > mhi) return LogComplex::zero();

  const auto b_first = std::lower_bound(b.nz_.begin(), b.nz_.end(), mlo);
  const auto b_last = std::upper_bound(b.nz_.begin(), b.nz_.end(), mhi);
  const auto a_first = std::lower_bound(a.nz_.begin(), a.nz_.end(), n - mhi);
  const auto a_last = std::upper_bound(a.nz_.begin(), a.nz_.end(), n - mlo);
  const bool over_a = (a_last - a_first) < (b_last - b_first);

  // Indices m of b; the partner is a[n - m].
  auto for_each = [&](auto&& fn) {
    if (over_a) {
      for (auto it = a_first; it != a_last; ++it) fn(n - *it);
    } else {
      for (auto it = b_first; it != b_last; ++it) fn(*it);
    }
  };
  double mx = -LogVec::kInf;
  for_each([&](std::size_t m) { mx = std::max(mx, a.lm_[n - m] + b.lm_[m]); });
  if (mx == -LogVec::kInf) return LogComplex::zero();
  std::complex<double> s(0, 0);
  double total = 0;
  for_each([&](std::size_t m) {
    const double w = std::exp(a.lm_[n - m] + b.lm_[m] - mx);
    s += w * (a.u_[n - m] * b.u_[m]);
    total += w;
  });
  const double mag = std::abs(s);
  LogComplex out;
  if (mag == 0) {
    out.cancelled = true;
    return out;
  }
  out.logmag = mx + std::log(mag);
  out.phase = std::arg(s);
  out.cancelled = mag < kCancellationFlag * total;
  return out;
}

std::vector<LogComplex> cauchy(const LogVec& a, const LogVec& b, std::size_t n) {
  std::vector<LogComplex> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = conv_at(a, b, i, 0, i);
  return out;
}

}  // namespace abg
