#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "abg/errors.hpp"
#include "abg/harness.hpp"

using namespace abg;
namespace fs = std::filesystem;

TEST_CASE("config parsing") {
  const HarnessConfig c = parse_config(
      "# comment\ntriple = iterlog:1,id,id\nn = 20\nplot = true\n[thm21]\nk = 3\nlower = 0; 0\n");
  CHECK(c.grid.n == 20);
  CHECK(c.plot);
  CHECK(c.sections.at("thm21").at("k") == "3");
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[thm21]\nbogus = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[nosuch]\n"), Error);
  CHECK_THROWS_AS(parse_config("n = abc\n"), Error);
  CHECK_THROWS_AS(parse_config("triple = id,id\n"), Error);
  CHECK_THROWS_AS(parse_config("q = 1.5\n"), Error);
  CHECK_THROWS_AS(parse_config("[thm21]\nk = 2\nk = 3\n"), Error);
  CHECK_NOTHROW(load_config(ABG_SOURCE_DIR "/configs/default.cfg"));
  CHECK_NOTHROW(load_config(ABG_SOURCE_DIR "/configs/degenerate.cfg"));
}

TEST_CASE("tower recognition") {
  const auto t = as_tower(build_tower({2, 0.5, 1.5}));
  REQUIRE(t);
  CHECK(t->level == 2);
  CHECK(t->c == 0.5);
  CHECK(t->mu == 1.5);
  CHECK_FALSE(as_tower(parse_expr("exp(z)")));
}

TEST_CASE("setup failures") {
  const ScaleTriple t = parse_triple("iterlog:1,id,id");
  CHECK_THROWS_AS(build_thm21(t, 2, 1.0, 1.0, {build_tower({2, 1.0, 1.0})}, RadialGrid{}), Error);
  CHECK_THROWS_AS(build_thm21(t, 3, 1.0, 1.0, {Expr::constant(0.0)}, RadialGrid{}), Error);
  CHECK_THROWS_AS(build_thm22(t, 2, 1.0, 1.0, {1.0}, RadialGrid{}), Error);

  const ScenarioReport rep = run_named("thm22", load_config(ABG_SOURCE_DIR "/configs/degenerate.cfg"));
  CHECK(rep.setup_failure);
  CHECK_FALSE(rep.pass());
  CHECK(rep.text().find("setup failure") != std::string::npos);
  CHECK_THROWS_AS(run_named("nosuch", HarnessConfig{}), Error);
}

TEST_CASE("an inadmissible triple aborts the scenario") {
  HarnessConfig c;
  c.triple = "id,id,id";
  const ScenarioReport rep = run_named("lemma36", c);
  CHECK_FALSE(rep.pass());
  REQUIRE_FALSE(rep.checks.empty());
  CHECK_FALSE(rep.checks.front().pass);
  CHECK(rep.measured.empty());
}

TEST_CASE("scenario run, determinism and bundle") {
  HarnessConfig c;
  const ScenarioReport a = run_named("lemma36", c);
  const ScenarioReport b = run_named("lemma36", c);
  CHECK(a.pass());
  CHECK(a.text() == b.text());
  CHECK(a.text().find("verdict: PASS") != std::string::npos);

  const fs::path dir = fs::temp_directory_path() / "abg_bundle_test";
  fs::remove_all(dir);
  const ScenarioReport t = run_named("thm21", c);
  CHECK(t.pass());
  write_bundle(t, dir.string(), true);
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "A0_order.csv"));
  CHECK(fs::exists(dir / "A0_order.svg"));
  std::ifstream svg(dir / "A0_order.svg");
  std::string first;
  std::getline(svg, first);
  CHECK(first.rfind("<svg", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("scenario list") {
  CHECK(scenario_names().size() == 12);
}
