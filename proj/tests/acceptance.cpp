// One line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>

#include "abg/bounds.hpp"
#include "abg/errors.hpp"
#include "abg/funcs.hpp"
#include "abg/growth.hpp"
#include "abg/harness.hpp"
#include "abg/ode.hpp"
#include "abg/scale.hpp"
#include "abg/series.hpp"

using namespace abg;
using C = std::complex<double>;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  if (!ok) ++failures;
  std::printf("[%s] %2d. %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
}

const ScaleTriple kTriple = parse_triple("iterlog:1,id,id");

RadialGrid trim(const Expr& f, RadialGrid g) {
  g.n = evaluable_prefix(f, g);
  return g;
}

}  // namespace

int main() {
  const RadialGrid grid;
  const HarnessConfig cfg;

  criterion(1, "scale admissibility", [](std::string& d) {
    const auto t0 = Clock::now();
    const ClassReport good = check_triple(kTriple);
    const ClassReport bad = check_triple(parse_triple("id,id,id"));
    const double secs = since(t0);
    bool only_c = !bad.pass;
    for (std::size_t i = 0; i + 1 < bad.parts.size(); ++i) only_c = only_c && bad.parts[i].pass;
    for (const auto& part : bad.parts.back().parts) {
      only_c = only_c && (part.pass == (part.check.find("(c)") == std::string::npos));
    }
    d = fmt("(iterlog:1,id,id) %s; (id,id,id) fails exactly the alpha^-1(kx) checks: %s; %.3f s",
            good.pass ? "passes" : "fails", only_c ? "yes" : "no", secs);
    return good.pass && only_c && secs < 1.0;
  });

  criterion(2, "M-order recovery on tower(2,c,mu)", [&](std::string& d) {
    bool ok = true;
    const double cm[3][2] = {{1, 1}, {2, 1}, {1, 0.5}};
    for (const auto& p : cm) {
      const auto t0 = Clock::now();
      const double v = order_estimate(build_tower({2, p[0], p[1]}), kTriple, grid, OrderMode::M_order).value;
      const double secs = since(t0);
      ok = ok && std::abs(v - p[1]) <= 0.05 && secs < 10;
      d += fmt("(%g,%g) -> %.4f [%.2f s]  ", p[0], p[1], v, secs);
    }
    d += fmt("last 1-r = %.2e", grid.one_minus_r(grid.n - 1));
    return ok;
  });

  criterion(3, "(alpha(log))-order recovery on tower(3,1,mu)", [&](std::string& d) {
    bool ok = true;
    for (double mu : {0.5, 1.0}) {
      const Expr f = build_tower({3, 1.0, mu});
      const RadialGrid g = trim(f, grid);
      const double v = order_estimate(f, kTriple, g, OrderMode::M_logorder).value;
      ok = ok && std::abs(v - mu) <= 0.05;
      d += fmt("mu=%g -> %.4f (n=%d)  ", mu, v, g.n);
    }
    return ok;
  });

  criterion(4, "type recovery on tower(2,c,1)", [&](std::string& d) {
    bool ok = true;
    for (double c : {0.5, 1.0, 2.0}) {
      const double v = type_estimate(build_tower({2, c, 1.0}), kTriple, grid, OrderMode::M_order, 1.0).value;
      ok = ok && std::abs(v - c) <= 0.1 * c;
      d += fmt("c=%g -> %.4f  ", c, v);
    }
    return ok;
  });

  criterion(5, "sandwich inequality on the catalog", [&](std::string& d) {
    const ScenarioReport r = run_named("ineq12", cfg);
    d = fmt("%d catalog functions, %s", static_cast<int>(r.checks.size()) - 1,
            r.pass() ? "all margins >= 0" : "violation or error");
    return r.pass();
  });

  criterion(6, "M- and T-based (alpha(log))-orders agree on tower(3,1,1)", [&](std::string& d) {
    const Expr f = build_tower({3, 1.0, 1.0});
    const Prop11Report r = proposition11_check(f, kTriple, trim(f, grid));
    d = fmt("M %.4f, T %.4f, |diff| %.2e", r.m_based.value, r.t_based.value, r.difference);
    return r.difference <= 0.1;
  });

  criterion(7, "orders of f and f' agree", [&](std::string& d) {
    const ScenarioReport r = run_named("lemma35", cfg);
    double worst = 0;
    int n = 0;
    for (const auto& c : r.checks) {
      if (c.relation.find("f')") == std::string::npos) continue;
      worst = std::max(worst, c.measured);
      ++n;
    }
    d = fmt("%d (function, mode) pairs over 4 catalog functions, max |diff| %.2e", n, worst);
    return r.pass() && n >= 3;
  });

  criterion(8, "series solver", [](std::string& d) {
    const OdeProblem ez = parse_problem("k = 2\nA0 = -1\nA1 = 0\nic = 1, 1\n");
    const LogSeries se = solve_series(ez, 512);
    double e_err = 0;
    for (double th : {0.0, 0.7, 2.0}) {
      const C z = std::polar(0.5, th);
      e_err = std::max(e_err, std::abs(eval_series(se, z).to_complex() - std::exp(z)) / std::abs(std::exp(z)));
    }
    const OdeProblem m = manufacture(parse_expr("exp(pow1mz(1))"), {Expr::constant(0.0)}, 2);
    const LogSeries sm = solve_series(m, 512);
    double m_err = 0;
    for (double th : {0.0, 0.7, 2.0}) {
      const C z = std::polar(0.3, th);
      const C want = std::exp(1.0 / (1.0 - z));
      m_err = std::max(m_err, std::abs(eval_series(sm, z).to_complex() - want) / std::abs(want));
    }
    const double res = std::max(residual(ez, se, 0.5), residual(m, sm, 0.3));
    d = fmt("e^z rel err %.1e; exp(1/(1-z)) rel err at r=0.3 %.1e; residual %.1e", e_err, m_err, res);
    return e_err <= 1e-12 && m_err <= 1e-9 && res <= 1e-9;
  });

  criterion(9, "bound domination and bound order", [&](std::string& d) {
    const ScenarioReport dom = run_named("lemma38", cfg);
    const ScenarioReport ord = run_named("lemma39", cfg);
    d = fmt("domination %s; order of bound %s", dom.pass() ? "holds" : "fails", ord.pass() ? "<= max coefficient order + 0.1" : "too large");
    for (const auto& m : ord.measured) d += "; " + m;
    return dom.pass() && ord.pass();
  });

  criterion(10, "dominant-coefficient scenarios", [&](std::string& d) {
    bool ok = true;
    HarnessConfig k3 = cfg;
    k3.sections["thm21"] = {{"k", "3"}, {"lower", "0; 0"}};
    const std::pair<const char*, const HarnessConfig*> runs[] = {
        {"thm21", &cfg}, {"thm21", &k3}, {"thm22", &cfg}};
    const char* labels[] = {"thm21 k=2", "thm21 k=3", "thm22"};
    for (int i = 0; i < 3; ++i) {
      const auto t0 = Clock::now();
      const ScenarioReport r = run_named(runs[i].first, *runs[i].second);
      const double secs = since(t0);
      ok = ok && r.pass() && secs < 60;
      d += fmt("%s %s [%.1f s]  ", labels[i], r.pass() ? "pass" : "FAIL", secs);
    }
    return ok;
  });

  criterion(11, "lower-bound set surrogate", [&](std::string& d) {
    const ScenarioReport a = run_named("lemma36", cfg);
    const ScenarioReport b = run_named("lemma37", cfg);
    const LowerSetReport la = lower_set_measure(build_tower({2, 1, 1}), kTriple, 0.5, grid);
    const LowerSetReport lb = lower_set_measure(build_tower({2, 2, 1}), kTriple, 0.0, grid, TypedThreshold{1, 1});
    d = fmt("untyped measure %.3f, typed measure %.3f", la.measure, lb.measure);
    return a.pass() && b.pass() && la.infinite_surrogate && lb.infinite_surrogate;
  });

  criterion(12, "performance", [&](std::string& d) {
    const OdeProblem m = manufacture(parse_expr("exp(pow1mz(1))"), {Expr::constant(0.0)}, 2);
    auto t0 = Clock::now();
    const LogSeries s = solve_series(m, 4096);
    const double solve_secs = since(t0);
    t0 = Clock::now();
    bool all = true;
    for (const auto& name : scenario_names()) all = run_named(name, cfg).pass() && all;
    const double suite = since(t0);
    d = fmt("solve_series N=%zu k=2 %.3f s; default verify suite %.1f s (%s)", s.size(), solve_secs,
            suite, all ? "all pass" : "failures");
    return solve_secs < 2.0 && suite < 300 && all;
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
