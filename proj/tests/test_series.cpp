#include <doctest.h>

#include <chrono>
#include <cmath>
#include <complex>

#include "abg/errors.hpp"
#include "abg/funcs.hpp"
#include "abg/ode.hpp"
#include "abg/series.hpp"

using namespace abg;
using C = std::complex<double>;

namespace {

OdeProblem ez() { return parse_problem("k = 2\nA0 = -1\nA1 = 0\nic = 1, 1\n"); }

}  // namespace

TEST_CASE("convolution matches the schoolbook product") {
  std::vector<LogComplex> a, b;
  std::vector<C> ca, cb;
  for (int i = 0; i < 20; ++i) {
    ca.push_back(std::polar(1.0 / (1 + i), 0.3 * i));
    cb.push_back(i % 3 == 0 ? C(0) : std::polar(2.0 / (2 + i), -0.2 * i));
    a.push_back(LogComplex::from_complex(ca.back()));
    b.push_back(LogComplex::from_complex(cb.back()));
  }
  const LogVec va(a), vb(b);
  for (std::size_t n : {0u, 5u, 19u}) {
    C want = 0;
    for (std::size_t m = 0; m <= n; ++m) want += ca[n - m] * cb[m];
    CHECK(std::abs(cauchy(va, vb, 20)[n].to_complex() - want) <= 1e-13 * (1 + std::abs(want)));
  }
}

TEST_CASE("e^z series") {
  const LogSeries s = solve_series(ez(), 64);
  double lf = 0;
  for (int n = 0; n < 64; ++n) {
    if (n > 0) lf += std::log(double(n));
    CHECK(std::abs(s.coeffs[n].logmag + lf) <= 1e-12 * (1 + lf));
  }
  CHECK(s.r_reliable == doctest::Approx(kMaxReliableRadius));
  CHECK(std::abs(eval_series(s, 0.5).logmag - 0.5) < 1e-12);
  const LogComplex v = eval_series_polar(s, 0.7, 1.1);
  CHECK(std::abs(v.to_complex() - std::exp(std::polar(0.7, 1.1))) < 1e-12);
  CHECK(std::abs(eval_series(s, 0.3, 2).to_complex() - std::exp(0.3)) < 1e-12);
  CHECK(residual(ez(), s, 0.9) < 1e-12);
}

TEST_CASE("truncated e^z residual against a direct oracle") {
  const LogSeries s = solve_series(ez(), 8);
  CHECK(s.r_reliable < 0.9);
  CHECK_THROWS_AS(eval_series(s, 0.9), ReliabilityError);
  try {
    eval_series(s, 0.9);
  } catch (const ReliabilityError& e) {
    CHECK(e.guard_radius() == doctest::Approx(s.r_reliable));
  }
  double oracle = 0;
  for (int i = 0; i < 64; ++i) {
    const C z = std::polar(0.9, kTwoPi * i / 64);
    C p = 0, p2 = 0, term = 1;
    for (int n = 0; n < 8; ++n) {
      p += term;
      if (n >= 2) p2 += term * double(n) * double(n - 1) / (z * z);
      term *= z / double(n + 1);
    }
    oracle = std::max(oracle, std::abs(p2 - p) / (std::abs(p2) + std::abs(p)));
  }
  const double got = residual(ez(), s, 0.9, 64, Guard::Bypass);
  CHECK(got == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(got > 1e-4);
}

TEST_CASE("manufactured exp(1/(1-z))") {
  const OdeProblem p = parse_problem("k = 2\nA1 = 0\nmanufacture = exp(pow1mz(1))\n");
  REQUIRE(p.solution);
  const LogSeries s = solve_series(p, 512);
  for (double th : {0.0, 1.0, 2.5}) {
    const C z = std::polar(0.3, th);
    const C want = std::exp(1.0 / (1.0 - z));
    CHECK(std::abs(eval_series(s, z).to_complex() - want) <= 1e-9 * std::abs(want));
  }
  CHECK(residual(p, s, 0.3) <= 1e-9);
  CHECK(closed_form_residual(p, DiscPoint::polar(0.95, 0.3)) < 1e-12);
  CHECK(s.r_reliable > 0.8);
  CHECK(s.r_reliable < 1.0);
}

TEST_CASE("N = 4096 solve is fast") {
  const OdeProblem p = parse_problem("k = 2\nA1 = 0\nmanufacture = exp(pow1mz(1))\n");
  const auto t0 = std::chrono::steady_clock::now();
  const LogSeries s = solve_series(p, 4096);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(s.size() == 4096);
  CHECK(secs < 2.0);
}

TEST_CASE("problem file parsing") {
  CHECK_THROWS_AS(parse_problem("k = 2\nA0 = -1\nfoo = 1\n"), Error);
  CHECK_THROWS_AS(parse_problem("k = 2\nA0 = -1\nA0 = 2\n"), Error);
  CHECK_THROWS_AS(parse_problem("k = 2\nA1 = 0\n"), Error);
  CHECK_THROWS_AS(parse_problem("k = 2\nA0 = 1\nmanufacture = exp(z)\n"), Error);
  CHECK_THROWS_AS(parse_problem("k = 1\nA0 = 1\n"), Error);
  const OdeProblem p = parse_problem("# comment\nk = 3\nA0 = z\n");
  CHECK(p.coeffs.size() == 3);
  CHECK(p.coeffs[2].is_const(0.0));
  const auto ic = p.initial_conditions();
  CHECK(ic.size() == 3);
  CHECK(ic[0].logmag == 0.0);
  CHECK(ic[1].is_zero());
}
