#include <doctest.h>

#include <cmath>

#include "abg/errors.hpp"
#include "abg/scale.hpp"

using namespace abg;

TEST_CASE("iterated log and exp") {
  CHECK(iterated_log(100.0, 1) == doctest::Approx(std::log(100.0)));
  CHECK(iterated_log(1e10, 2) == doctest::Approx(std::log(std::log(1e10))));
  CHECK(iterated_log(1e10, 3) == doctest::Approx(std::log(std::log(std::log(1e10)))));
  CHECK(iterated_log(0.5, 2) == -INFINITY);
  CHECK(iterated_exp(1.0, 2) == doctest::Approx(std::exp(std::exp(1.0))));
  CHECK(iterated_exp(iterated_log(1e8, 2), 2) == doctest::Approx(1e8));
}

TEST_CASE("scale functions and inverses") {
  const ScaleFn l2 = ScaleFn::iterated_log(2);
  CHECK(l2(1e20) == doctest::Approx(std::log(std::log(1e20))));
  CHECK(l2.inverse(l2(1e20)) == doctest::Approx(1e20));
  CHECK(l2.log_inverse(50.0) == doctest::Approx(std::exp(50.0)));
  CHECK_THROWS_AS(l2.inverse(l2.cap_value() - 1.0), Error);
  const ScaleFn p = ScaleFn::power(0.5);
  CHECK(p(16.0) == doctest::Approx(4.0));
  CHECK(p.inverse(4.0) == doctest::Approx(16.0));
  CHECK(ScaleFn::identity()(7.0) == 7.0);
}

TEST_CASE("parsing") {
  CHECK(parse_scale("iterlog:3").name() == "iterlog:3");
  CHECK(parse_scale("pow:0.5").name() == "pow:0.5");
  CHECK(parse_triple("iterlog:1,id,id").name() == "iterlog:1,id,id");
  CHECK_THROWS_AS(parse_scale("log"), Error);
  CHECK_THROWS_AS(parse_triple("id,id"), Error);
  CHECK_THROWS_AS(parse_scale("iterlog:0"), Error);
}

TEST_CASE("denominator beta(log gamma(1/(1-r)))") {
  const ScaleTriple t = parse_triple("iterlog:1,id,id");
  CHECK(t.denominator(0.01) == doctest::Approx(std::log(100.0)));
  const ScaleTriple t2 = parse_triple("id,iterlog:1,pow:0.5");
  CHECK(t2.denominator(1e-4) == doctest::Approx(std::log(0.5 * std::log(1e4))));
  // iterlog:1 is clamped to its cap value 1 below x = e
  CHECK(t2.denominator(0.01) == 1.0);
}

TEST_CASE("class checks") {
  CHECK(check_class(ScaleFn::iterated_log(1), ScaleClass::L1, SampleSpec::defaults()).pass);
  CHECK(check_class(ScaleFn::identity(), ScaleClass::L1, SampleSpec::defaults()).pass);
  CHECK(check_class(ScaleFn::power(0.5), ScaleClass::L3, SampleSpec::defaults()).pass);
  // x^2 is superadditive with unbounded excess
  CHECK_FALSE(check_class([](double x) { return x * x; }, ScaleClass::L1, SampleSpec::defaults()).pass);
  // shifts keep changing 2 + sin x by a non-vanishing factor
  SampleSpec moderate = SampleSpec::defaults();
  moderate.x_grid.clear();
  for (int i = 1; i <= 200; ++i) moderate.x_grid.push_back(10.0 * i);
  CHECK_FALSE(check_class([](double x) { return 2.0 + std::sin(x); }, ScaleClass::L2, moderate).pass);
  // x^2 violates f(mx) <= m f(x)
  CHECK_FALSE(check_class([](double x) { return x * x; }, ScaleClass::L3, SampleSpec::defaults()).pass);
}

TEST_CASE("triple admissibility") {
  CHECK(check_triple(parse_triple("iterlog:1,id,id")).pass);
  const ClassReport bad = check_triple(parse_triple("id,id,id"));
  CHECK_FALSE(bad.pass);
  // L1/L2/L3 hold for the identity; only condition (ii) part (c) fails
  for (std::size_t i = 0; i + 1 < bad.parts.size(); ++i) CHECK(bad.parts[i].pass);
  const ClassReport& cond = bad.parts.back();
  CHECK_FALSE(cond.pass);
  for (const auto& part : cond.parts) {
    const bool is_c = part.check.find("(c)") != std::string::npos;
    CHECK(part.pass == !is_c);
  }
}
