#include <doctest.h>

#include <cmath>
#include <sstream>

#include "abg/bounds.hpp"
#include "abg/errors.hpp"
#include "abg/ode.hpp"

using namespace abg;

namespace {
const ScaleTriple kTriple = parse_triple("iterlog:1,id,id");
}

TEST_CASE("exceptional sets and log-measure") {
  ExceptionalSet s;
  s.add(0.5, 0.9);
  CHECK(log_measure(s) == doctest::Approx(std::log(5.0)));
  s.add(0.9, 0.99);
  CHECK(s.intervals.size() == 1);
  CHECK(log_measure(s) == doctest::Approx(std::log(50.0)));
  s.add(0.1, 0.2);
  CHECK(log_measure(s) == doctest::Approx(std::log(50.0) + std::log(0.9 / 0.8)));
  ExceptionalSet bad;
  bad.intervals = {{0.1, 0.5}, {0.4, 0.6}};
  CHECK_THROWS_AS(log_measure(bad), Error);
  bad.intervals = {{0.5, 1.0}};
  CHECK_THROWS_AS(log_measure(bad), Error);
  CHECK(log_measure(ExceptionalSet{}) == 0.0);
}

TEST_CASE("cells from a mask") {
  const RadialGrid g{0.5, 0.5, 4};  // r = 0.5, 0.75, 0.875, 0.9375
  const ExceptionalSet s = cells_from_mask(g, {false, true, true, false});
  REQUIRE(s.intervals.size() == 1);
  CHECK(s.intervals[0].lo == doctest::Approx(0.75));
  CHECK(s.intervals[0].hi == doctest::Approx(0.9375));
}

TEST_CASE("coefficient-integral bound for e^z") {
  const OdeProblem p = parse_problem("k = 2\nA0 = -1\nA1 = 0\nic = 1, 1\n");
  for (double r : {0.5, 0.9}) {
    const HeittokangasBound b = heittokangas_bound(p, r, 0.0);
    CHECK(b.log_C == doctest::Approx(std::log(2.0)));
    CHECK(b.log_I == doctest::Approx(std::log(r)));
    CHECK(b.n_c == 1);
    CHECK(b.log_bound.value() == doctest::Approx(std::log(2.0) + r));
    CHECK(b.log_bound.value() >= r);  // log M(r, e^z) = r
  }
}

TEST_CASE("bound order for a manufactured level-3 solution") {
  const OdeProblem p = manufacture(build_tower({3, 1.0, 0.5}), {Expr::constant(0.0)}, 2);
  const OrderEstimate e = order_of_bound(p, kTriple, RadialGrid{});
  CHECK(e.value == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("Borel shift") {
  std::vector<double> r, g, h;
  for (int i = 0; i <= 50; ++i) {
    r.push_back(i / 51.0);
    g.push_back(r.back());
    h.push_back(r.back() * r.back());
  }
  // r <= (1 - 0.1 (1 - r))^2 on [0, 1)
  const BorelShiftResult res = borel_shift_check(r, g, h, {}, 0.1);
  CHECK(res.pass);
  CHECK_FALSE(res.precondition_ok);
  CHECK(res.checked > 0);
  std::vector<double> backwards(r.rbegin(), r.rend());
  CHECK_THROWS_AS(borel_shift_check(backwards, g, h, {}, 0.1), Error);
}

TEST_CASE("exceptional-set checks") {
  const RadialGrid grid;
  const BoundReport ld = log_derivative_check(parse_expr("exp(pow1mz(1))"), 2, 0, grid, 0.5, 1.0);
  CHECK(ld.measure == 0.0);
  std::ostringstream os;
  write_bound_csv(os, ld);
  CHECK(os.str().rfind("r,lhs_log,rhs_log,margin,violate\n", 0) == 0);
  CHECK(os.str().find("# log_measure:") != std::string::npos);

  const BoundReport px = proximity_bound_check(parse_expr("exp(z)"), 1, kTriple, grid, 1.0);
  CHECK(px.measure <= 0.5);
}

TEST_CASE("lower-bound sets") {
  const RadialGrid grid;
  const LowerSetReport a = lower_set_measure(parse_expr("tower(2,1,1)"), kTriple, 0.5, grid);
  CHECK(a.infinite_surrogate);
  CHECK(a.measure > 3.0);
  for (std::size_t i = 1; i < a.cumulative.size(); ++i) CHECK(a.cumulative[i] >= a.cumulative[i - 1]);
  const LowerSetReport b = lower_set_measure(parse_expr("tower(2,2,1)"), kTriple, 0.0, grid,
                                             TypedThreshold{1.0, 1.0});
  CHECK(b.infinite_surrogate);
  CHECK(b.measured == doctest::Approx(2.0).epsilon(0.1));
  CHECK_THROWS_AS(lower_set_measure(parse_expr("tower(2,1,0.5)"), kTriple, 0.9, grid), Error);
  CHECK_THROWS_AS(lower_set_measure(parse_expr("tower(2,2,1)"), kTriple, 0.0, grid,
                                    TypedThreshold{3.0, 1.0}),
                  Error);
}
