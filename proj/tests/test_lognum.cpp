#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "abg/errors.hpp"
#include "abg/lognum.hpp"

using namespace abg;
using C = std::complex<double>;

namespace {
bool close(C a, C b, double tol = 1e-13) { return std::abs(a - b) <= tol * (1 + std::abs(b)); }
}

TEST_CASE("arithmetic agrees with std::complex") {
  const std::vector<C> vals{{1.5, -0.25}, {-3, 2}, {0.001, 0}, {-7, 0}, {0, 1e-3}, {2.5, 2.5}};
  for (C a : vals) {
    for (C b : vals) {
      const auto la = LogComplex::from_complex(a), lb = LogComplex::from_complex(b);
      CHECK(close((la * lb).to_complex(), a * b));
      CHECK(close((la + lb).to_complex(), a + b, 1e-12));
      CHECK(close((la - lb).to_complex(), a - b, 1e-12));
    }
    CHECK(close(lc_exp(LogComplex::from_complex(a)).to_complex(), std::exp(a), 1e-12));
    CHECK(close(lc_pow(LogComplex::from_complex(a), 2.5).to_complex(), std::pow(a, 2.5), 1e-12));
  }
}

TEST_CASE("zero and exact cancellation") {
  const auto a = LogComplex::from_real(3.0);
  CHECK((a - a).is_zero());
  CHECK(LogComplex::from_real(0.0).is_zero());
  CHECK((a * LogComplex::zero()).is_zero());
  CHECK((a + LogComplex::zero()).logmag == doctest::Approx(std::log(3.0)));
}

TEST_CASE("huge magnitudes stay finite in log form") {
  const auto big = LogComplex::polar_log(1e6, 0.3);
  const auto prod = big * big;
  CHECK(prod.logmag == doctest::Approx(2e6));
  CHECK(prod.phase == doctest::Approx(0.6));
  CHECK_THROWS_AS(lc_exp(big), TowerOverflow);
}

TEST_CASE("lse_sum matches a direct sum") {
  std::vector<LogComplex> terms;
  C direct = 0;
  for (int i = 1; i <= 50; ++i) {
    const C v = std::polar(1.0 / i, 0.1 * i);
    direct += v;
    terms.push_back(LogComplex::from_complex(v));
  }
  CHECK(close(lse_sum(terms).to_complex(), direct, 1e-13));
}

TEST_CASE("wrap_phase and log_re") {
  CHECK(wrap_phase(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(log_re(LogComplex::from_complex({2, 5})) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(log_re(LogComplex::from_complex({-2, 5})), Error);
}

TEST_CASE("LogModulus") {
  const auto m = LogModulus::from_log_abs(1e5);
  CHECK(m.value() == doctest::Approx(1e5));
  CHECK(m.loglog() == doctest::Approx(std::log(1e5)));
  CHECK(LogModulus::from_log_abs(-2.0).value() == doctest::Approx(-2.0));
  CHECK(LogModulus::from_log_abs(0.0).value() == 0.0);
  CHECK(LogModulus::from_log_abs(-2.0) < m);
  CHECK((m + LogModulus::from_log_abs(5.0)).value() == doctest::Approx(1e5 + 5));
  CHECK(scale(m, 3.0).value() == doctest::Approx(3e5));
  // log|f| of size e^1000 is representable through log_of_abs
  LogModulus huge{1, 1000.0};
  CHECK(huge.loglog() == doctest::Approx(1000.0));
  CHECK(std::isinf(huge.value()));
}
