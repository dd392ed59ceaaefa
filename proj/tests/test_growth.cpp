#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "abg/errors.hpp"
#include "abg/funcs.hpp"
#include "abg/growth.hpp"
#include "abg/quad.hpp"

using namespace abg;

namespace {

const ScaleTriple kTriple = parse_triple("iterlog:1,id,id");

// T(r, 1/(1-z)) by a dense midpoint sum.
double t_pole_oracle(double r) {
  const int n = 400000;
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const double th = kTwoPi * (i + 0.5) / n;
    s += std::max(0.0, -std::log(std::abs(1.0 - std::polar(r, th))));
  }
  return s / n;
}

}  // namespace

TEST_CASE("log-space quadrature") {
  // integral of e^x over [0,1] is e - 1
  const auto r = log_integrate([](double x) { return x; }, {0.0, 1.0});
  CHECK(r.converged);
  CHECK(r.log_value == doctest::Approx(std::log(std::exp(1.0) - 1.0)).epsilon(1e-10));
  // integrand far beyond double range
  const auto big = log_integrate([](double x) { return 1e5 * x; }, {0.0, 1.0});
  CHECK(big.log_value == doctest::Approx(1e5 - std::log(1e5)).epsilon(1e-8));
}

TEST_CASE("maximum modulus") {
  CHECK(max_modulus(parse_expr("exp(z)"), 0.6).logM() == doctest::Approx(0.6).epsilon(1e-12));
  const GrowthSample s = max_modulus(parse_expr("exp(-(z))"), 0.6);
  CHECK(s.logM() == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(std::abs(std::abs(s.theta_argmax) - kPi) < 1e-4);
  CHECK(max_modulus(parse_expr("pow1mz(1)"), 0.99).logM() == doctest::Approx(-std::log(0.01)).epsilon(1e-12));
}

TEST_CASE("Nevanlinna characteristic") {
  for (double r : {0.3, 0.5, 0.9}) {
    CHECK(characteristic(parse_expr("exp(z)"), r).T() == doctest::Approx(r / kPi).epsilon(1e-10));
  }
  CHECK(characteristic(parse_expr("pow1mz(1)"), 0.9).T() == doctest::Approx(t_pole_oracle(0.9)).epsilon(1e-6));
  CHECK(characteristic(parse_expr("const(0.5)"), 0.5).T() == 0.0);
}

TEST_CASE("estimator on synthetic data") {
  std::vector<double> num, den;
  for (int i = 0; i < 12; ++i) {
    den.push_back(1.0 + i);
    num.push_back(2.0 * den.back() + 3.0);
  }
  const OrderEstimate e = estimate_from(num, den, 8);
  CHECK(e.value == doctest::Approx(2.0));
  CHECK(e.slope == doctest::Approx(2.0));
  CHECK(e.intercept == doctest::Approx(3.0));
  CHECK(e.raw_tail_max > 2.0);
  std::vector<double> gap(num.size(), kNaN);
  gap[0] = gap[1] = 1.0;
  CHECK_THROWS_AS(estimate_from(gap, den, 8), Error);
}

TEST_CASE("orders and types of towers") {
  const RadialGrid g;
  CHECK(order_estimate(parse_expr("tower(2,1,1)"), kTriple, g, OrderMode::M_order).value ==
        doctest::Approx(1.0).epsilon(0.05));
  CHECK(order_estimate(parse_expr("tower(2,1,0.5)"), kTriple, g, OrderMode::M_order).value ==
        doctest::Approx(0.5).epsilon(0.05));
  CHECK(order_estimate(parse_expr("const(3)"), kTriple, g, OrderMode::M_order).value == 0.0);
  const TypeEstimate t = type_estimate(parse_expr("tower(2,2,1)"), kTriple, g, OrderMode::M_order, 1.0);
  CHECK(t.value == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("threads do not change results") {
  GrowthOptions one, two;
  two.threads = 2;
  const Expr f = parse_expr("tower(2,1,0.5)");
  const auto a = order_estimate(f, kTriple, RadialGrid{}, OrderMode::T_order, one);
  const auto b = order_estimate(f, kTriple, RadialGrid{}, OrderMode::T_order, two);
  CHECK(a.value == b.value);
  std::ostringstream sa, sb;
  write_growth_csv(sa, a);
  write_growth_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("r,one_minus_r,logM,loglogM,log3M,T,ratio,mode\n", 0) == 0);
}

TEST_CASE("grid trimming and the sandwich inequality") {
  const RadialGrid g;
  CHECK(evaluable_prefix(parse_expr("tower(3,1,1)"), g) == 18);
  CHECK(evaluable_prefix(parse_expr("tower(2,1,1)"), g) == g.n);
  const Ineq12Report r = verify_ineq_12(parse_expr("exp(z)"), g);
  CHECK(r.pass);
  CHECK(r.evaluated == g.n);
}

TEST_CASE("modes") {
  CHECK(parse_mode("M") == OrderMode::M_order);
  CHECK(parse_mode("Tlog") == OrderMode::T_logorder);
  CHECK(uses_T(OrderMode::T_order));
  CHECK_FALSE(uses_T(OrderMode::M_logorder));
  CHECK_THROWS_AS(parse_mode("X"), Error);
  CHECK_THROWS_AS((RadialGrid{1.5, 0.7, 10}.validate()), Error);
}
