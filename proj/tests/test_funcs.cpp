#include <doctest.h>

#include <cmath>
#include <complex>

#include "abg/errors.hpp"
#include "abg/funcs.hpp"
#include "abg/series.hpp"

using namespace abg;
using C = std::complex<double>;

namespace {

C direct_tower(int level, double c, double mu, C z) {
  C v = c * std::pow(1.0 - z, -mu);
  for (int i = 0; i < level; ++i) v = std::exp(v);
  return v;
}

bool close(C a, C b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

// Taylor coefficients of exp(1/(1-z)) / e: a_0 = 1, a_n = sum_k C(n-1,k-1)/k!.
long double exp_pole_coeff(int n) {
  if (n == 0) return 1.0L;
  long double s = 0, binom = 1, fact = 1;  // binom = C(n-1, k-1), fact = k!
  for (int k = 1; k <= n; ++k) {
    fact *= k;
    s += binom / fact;
    binom = binom * (n - k) / k;
  }
  return s;
}

}  // namespace

TEST_CASE("parse and print round trip") {
  for (const char* s : {"exp(z)", "pow1mz(1)", "2*exp(pow1mz(0.5))", "(z + 1)^3",
                        "exp(exp(pow1mz(1)))", "const(1,2)*z", "-(z)"}) {
    const Expr e = parse_expr(s);
    CHECK(to_string(parse_expr(to_string(e))) == to_string(e));
  }
  CHECK(to_string(parse_expr("tower(2,1,1)")) == "exp(exp(pow1mz(1)))");
  CHECK(to_string(parse_expr("tower(1,2,0.5)")) == "exp(2*pow1mz(0.5))");
  CHECK_THROWS_AS(parse_expr("exp(z"), Error);
  CHECK_THROWS_AS(parse_expr("pow1mz(z)"), Error);
  CHECK_THROWS_AS(parse_expr("tower(4,1,1)"), Error);
  CHECK_THROWS_AS(parse_expr("z^-1"), Error);
  CHECK_THROWS_AS(parse_expr("foo(z)"), Error);
}

TEST_CASE("evaluation agrees with std::complex") {
  const C pts[] = {{0.3, 0.2}, {-0.5, 0.1}, {0.7, -0.6}, {0.0, 0.0}};
  for (C z : pts) {
    CHECK(close(eval_log(parse_expr("tower(2,1,1)"), z).to_complex(), direct_tower(2, 1, 1, z), 1e-12));
    CHECK(close(eval_log(parse_expr("tower(1,2,0.5)"), z).to_complex(), direct_tower(1, 2, 0.5, z), 1e-12));
    const C v = 3.0 * z * z - z + 2.0;
    CHECK(close(eval_log(parse_expr("3*z^2 - z + 2"), z).to_complex(), v, 1e-13));
  }
}

TEST_CASE("log_abs of a level-3 tower near the boundary") {
  // log|f| = Re exp(exp(1/(1-z))) and at theta = 0 that is exp(e^{1/(1-r)})
  const Expr f = build_tower({3, 1.0, 1.0});
  const double omr = 0.2;
  const LogModulus m = log_abs(f, DiscPoint::polar_1mr(omr, 0.0));
  CHECK(m.value() == doctest::Approx(std::exp(std::exp(1.0 / omr))).epsilon(1e-12));
  CHECK_THROWS_AS(eval_log(f, DiscPoint::polar_1mr(1e-3, 0.0)), TowerOverflow);
}

TEST_CASE("derivatives agree with central differences") {
  const double h = 1e-5;
  for (const char* s : {"tower(2,1,1)", "exp(z^2)*pow1mz(0.5)", "tower(3,0.5,0.5)", "(z + 2)^4"}) {
    const Expr f = parse_expr(s);
    const Expr df = diff(f);
    for (C z : {C(0.2, 0.1), C(-0.3, 0.4)}) {
      const C fd = (eval_log(f, z + h).to_complex() - eval_log(f, z - h).to_complex()) / (2 * h);
      CHECK(close(eval_log(df, z).to_complex(), fd, 1e-8));
    }
  }
  CHECK(diff(parse_expr("3")).is_const(0.0));
  CHECK_THROWS_AS(diff(build_tower({3, 1, 1}), 10), Error);
}

TEST_CASE("log derivative ratios of exp(g)") {
  // f = e^z: every D_j is 1
  const auto d = log_derivative_ratios(parse_expr("exp(z)"), 3);
  for (const auto& dj : d) CHECK(std::abs(eval_log(dj, C(0.4, 0.3)).to_complex() - 1.0) < 1e-14);
}

TEST_CASE("taylor coefficients") {
  const LogSeries e = taylor(parse_expr("exp(z)"), 30);
  double lf = 0;
  for (int n = 0; n < 30; ++n) {
    if (n > 0) lf += std::log(double(n));
    CHECK(e.coeffs[n].logmag == doctest::Approx(-lf).epsilon(1e-13));
  }
  const LogSeries p = taylor(parse_expr("pow1mz(2)"), 50);
  for (int n = 0; n < 50; ++n) CHECK(std::exp(p.coeffs[n].logmag) == doctest::Approx(n + 1.0));

  const LogSeries q = taylor(parse_expr("exp(pow1mz(1))"), 200);
  for (int n : {0, 1, 2, 3, 10, 50, 199}) {
    const double want = 1.0 + std::log(static_cast<double>(exp_pole_coeff(n)));
    CHECK(q.coeffs[n].logmag == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::abs(q.coeffs[n].phase) < 1e-12);
  }
  CHECK(std::exp(q.coeffs[3].logmag) == doctest::Approx(std::exp(1.0) * 13.0 / 6.0));
  CHECK_THROWS_AS(taylor(build_tower({3, 1, 1}), 10), Error);
}

TEST_CASE("catalog") {
  const auto& cat = catalog();
  CHECK(cat.size() >= 10);
  for (const auto& c : cat) CHECK(to_string(parse_expr(c.name)) == to_string(c.expr));
}
