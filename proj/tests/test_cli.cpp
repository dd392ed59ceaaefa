#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"

using namespace abg;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

double field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + " = ");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size() + 3));
}

const std::string kSrc = ABG_SOURCE_DIR;

}  // namespace

TEST_CASE("order and type") {
  auto r = cli({"order", "--func", "tower(2,1,1)", "--triple", "iterlog:1,id,id", "--mode", "M"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "order") == doctest::Approx(1.0).epsilon(0.05));
  r = cli({"order", "--func", "const(3)"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "order") == 0.0);
  CHECK(cli({"order", "--func", "z", "--triple", "bad"}).code == 2);
  CHECK(cli({"order", "--func", "exp(z"}).code == 2);
  r = cli({"order", "--func", "tower(3,1,1)", "--mode", "Mlog"});
  CHECK(r.code == 0);
  CHECK(r.err.find("grid trimmed") != std::string::npos);
  r = cli({"type", "--func", "tower(2,2,1)", "--rho", "1"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "type") == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("solve, residual, bound") {
  const std::string ez = kSrc + "/problems/ez.prob";
  auto r = cli({"solve", "--problem", ez, "--n", "64", "--eval", "0.5"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "logmag") == doctest::Approx(0.5).epsilon(1e-12));
  r = cli({"solve", "--problem", ez, "--n", "64", "--eval", "0.99"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "logmag") == doctest::Approx(0.99).epsilon(1e-12));
  r = cli({"solve", "--problem", ez, "--n", "8", "--eval", "0.99"});
  CHECK(r.code == 3);
  CHECK(r.err.find("guard radius") != std::string::npos);
  r = cli({"bound", "--problem", ez, "--r", "0.9", "--theta", "0"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "log_bound") == doctest::Approx(field(r.out, "log_C") + 0.9));
  r = cli({"residual", "--problem", kSrc + "/problems/manufactured.prob", "--n", "512", "--r", "0.3"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "residual") < 1e-9);
  CHECK(cli({"solve", "--problem", "/nonexistent.prob"}).code == 2);
}

TEST_CASE("verify") {
  const std::string out = (std::filesystem::temp_directory_path() / "abg_cli_test").string();
  auto r = cli({"verify", "thm21", "--config", kSrc + "/configs/default.cfg", "--outdir", out});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(out + "/thm21/report.txt"));
  CHECK(cli({"verify", "nosuch", "--no-bundle"}).code == 2);
  r = cli({"verify", "thm22", "--config", kSrc + "/configs/degenerate.cfg", "--no-bundle"});
  CHECK(r.code == 1);
  CHECK(r.out.find("setup failure") != std::string::npos);
  std::filesystem::remove_all(out);
}

TEST_CASE("misc subcommands") {
  auto r = cli({"catalog"});
  CHECK(r.code == 0);
  CHECK(r.out.find("tower(3,1,1)") != std::string::npos);
  CHECK(cli({"check-triple", "iterlog:1,id,id"}).code == 0);
  CHECK(cli({"check-triple", "id,id,id"}).code == 1);
  r = cli({"measure", "--func", "tower(2,1,1)", "--mu", "0.5"});
  CHECK(r.code == 0);
  CHECK(r.out.find("infinite_surrogate = true") != std::string::npos);
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}
