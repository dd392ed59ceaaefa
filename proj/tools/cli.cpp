#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "abg/bounds.hpp"
#include "abg/errors.hpp"
#include "abg/funcs.hpp"
#include "abg/growth.hpp"
#include "abg/harness.hpp"
#include "abg/ode.hpp"
#include "abg/scale.hpp"
#include "abg/series.hpp"

namespace abg {
namespace {

std::string g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct GridArgs {
  double r0 = 0.5;
  double q = 0.72;
  int n = 24;
  int n_theta = 128;
  int tail_k = 8;
  int threads = 1;

  void add(CLI::App* c) {
    c->add_option("--r0", r0, "first grid radius")->capture_default_str();
    c->add_option("--q", q, "ratio of successive 1-r")->capture_default_str();
    c->add_option("--n", n, "number of grid radii")->capture_default_str();
    c->add_option("--n-theta", n_theta, "angular samples for M(r)")->capture_default_str();
    c->add_option("--tail-k", tail_k, "tail length of the order fit")->capture_default_str();
    c->add_option("--threads", threads, "worker threads")->capture_default_str();
  }
  RadialGrid grid() const {
    RadialGrid g{r0, q, n};
    g.validate();
    return g;
  }
  GrowthOptions opts() const {
    GrowthOptions o;
    o.n_theta = n_theta;
    o.tail_k = tail_k;
    o.threads = std::max(1, threads);
    return o;
  }
};

RadialGrid trimmed(const Expr& f, RadialGrid g, std::ostream& err) {
  const int n = evaluable_prefix(f, g);
  if (n < g.n) {
    err << "note: grid trimmed from " << g.n << " to " << n << " radii (last 1-r = "
        << g10(g.one_minus_r(std::max(n - 1, 0))) << ") to keep exp arguments representable\n";
    g.n = n;
  }
  if (g.n < 4) fail(ErrorKind::OutOfRegime, "fewer than 4 grid radii are evaluable");
  return g;
}

template <class F>
void with_output(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty()) return;
  if (path == "-") {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) fail(ErrorKind::Argument, "cannot write " + path);
  write(f);
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Argument:
    case ErrorKind::Parse:
      return kExitUsage;
    case ErrorKind::Setup:
      return kExitVerdict;
    default:
      return kExitNumeric;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"growth of analytic functions in the unit disc", "abg"};
  app.require_subcommand(1);
  std::string triple_s = "iterlog:1,id,id";

  // order / type
  std::string func, mode_s = "M", csv;
  std::optional<double> rho;
  GridArgs ga;
  auto* order = app.add_subcommand("order", "estimate an (alpha,beta,gamma)-order");
  auto* type = app.add_subcommand("type", "estimate an (alpha,beta,gamma)-type");
  for (auto* c : {order, type}) {
    c->add_option("--func", func, "function expression")->required();
    c->add_option("--triple", triple_s, "scale triple alpha,beta,gamma")->capture_default_str();
    c->add_option("--mode", mode_s, "M, T, Mlog or Tlog")->capture_default_str();
    c->add_option("--csv", csv, "write the sample table here ('-' for stdout)");
    ga.add(c);
  }
  type->add_option("--rho", rho, "order in the type denominator (default: measured)");

  // solve / residual / bound
  std::string problem;
  std::size_t n_terms = kDefaultSeriesTerms;
  std::optional<double> eval_r;
  double theta = 0.0, r = 0.0, nu = 0.0, eps = 1.0;
  int deriv = 0, n_theta_res = 64;
  bool no_guard = false;
  auto* solve = app.add_subcommand("solve", "power-series solution of a linear ODE");
  auto* resid = app.add_subcommand("residual", "relative residual of the series solution");
  auto* bound = app.add_subcommand("bound", "coefficient-integral bound on log|f|");
  for (auto* c : {solve, resid, bound}) {
    c->add_option("--problem", problem, "problem file")->required()->check(CLI::ExistingFile);
    c->add_option("--n", n_terms, "series terms")->capture_default_str();
  }
  solve->add_option("--eval", eval_r, "evaluate at r e^{i theta}");
  solve->add_option("--theta", theta, "argument of the evaluation point");
  solve->add_option("--deriv", deriv, "derivative order");
  solve->add_option("--csv", csv, "write the coefficients here ('-' for stdout)");
  solve->add_flag("--no-guard", no_guard, "evaluate past the reliable radius");
  resid->add_option("--r", r, "radius")->required();
  resid->add_option("--n-theta", n_theta_res, "angular samples")->capture_default_str();
  resid->add_flag("--no-guard", no_guard, "evaluate past the reliable radius");
  bound->add_option("--r", r, "radius")->required();
  bound->add_option("--theta", theta, "direction");
  bound->add_option("--nu", nu, "start of the integration path");
  bound->add_option("--eps", eps, "epsilon in the constant")->capture_default_str();
  bound->add_option("--csv", csv, "write a table over the radial grid here ('-' for stdout)");

  // measure
  std::string kind = "lower";
  double mu = 0.5, omega = 1.0, d = 0.5;
  double rho_t = 1.0;
  int k = 2, j = 0;
  GridArgs gm;
  auto* measure = app.add_subcommand("measure", "log-measure of exceptional or lower-bound sets");
  measure->add_option("--func", func, "function expression")->required();
  measure->add_option("--kind", kind, "lower, typed, logderiv or proximity")
      ->check(CLI::IsMember({"lower", "typed", "logderiv", "proximity"}))
      ->capture_default_str();
  measure->add_option("--triple", triple_s, "scale triple")->capture_default_str();
  measure->add_option("--mu", mu, "threshold order (lower)")->capture_default_str();
  measure->add_option("--omega", omega, "threshold type (typed)")->capture_default_str();
  measure->add_option("--rho", rho_t, "threshold order (typed)")->capture_default_str();
  measure->add_option("--k", k, "derivative order (logderiv, proximity)")->capture_default_str();
  measure->add_option("--j", j, "lower derivative order (logderiv)")->capture_default_str();
  measure->add_option("--d", d, "shift factor (logderiv)")->capture_default_str();
  measure->add_option("--eps", eps, "epsilon")->capture_default_str();
  measure->add_option("--csv", csv, "write the table here ('-' for stdout)");
  gm.add(measure);

  // verify
  std::string scenario, config, outdir;
  bool plot = false, no_bundle = false;
  std::optional<int> threads;
  auto* verify = app.add_subcommand("verify", "run a scenario and write its report bundle");
  verify->add_option("scenario", scenario, "scenario name or 'all'")->required();
  verify->add_option("--config", config, "config file")->check(CLI::ExistingFile);
  verify->add_option("--outdir", outdir, "report directory (overrides the config)");
  verify->add_flag("--plot", plot, "also write SVG plots");
  verify->add_flag("--no-bundle", no_bundle, "print the report only");
  verify->add_option("--threads", threads, "worker threads");

  auto* cat = app.add_subcommand("catalog", "list the built-in functions");

  int p_max = 3;
  auto* chk = app.add_subcommand("check-triple", "admissibility checks for a scale triple");
  chk->add_option("triple", triple_s, "alpha,beta,gamma")->required();
  chk->add_option("--p-max", p_max, "largest p in the iterated-log condition")->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*order || *type) {
      const ScaleTriple t = parse_triple(triple_s);
      const OrderMode mode = parse_mode(mode_s);
      const Expr f = parse_expr(func);
      const RadialGrid g = trimmed(f, ga.grid(), err);
      const GrowthOptions o = ga.opts();
      const auto samples = sample_grid(f, g, uses_T(mode), o);
      const OrderEstimate e = order_from_samples(samples, t, mode, o.tail_k);
      out << "function: " << to_string(f) << "\n";
      out << "triple: " << t.name() << "\n";
      out << "mode: " << to_string(mode) << "\n";
      if (*order) {
        out << "order = " << g10(e.value) << "\n";
        out << "raw_tail_max = " << g10(e.raw_tail_max) << "\n";
        out << "slope = " << g10(e.slope) << "\n";
        out << "tail_used = " << e.tail_used << "\n";
        with_output(csv, out, [&](std::ostream& os) { write_growth_csv(os, e); });
      } else {
        const double rh = rho.value_or(e.value);
        const TypeEstimate te = type_from_samples(samples, t, mode, rh, o.tail_k);
        out << "rho_used = " << g10(te.rho_used) << "\n";
        out << "type = " << g10(te.value) << "\n";
        with_output(csv, out, [&](std::ostream& os) {
          os << "r,log_ratio\n";
          for (std::size_t i = 0; i < te.log_ratios.size(); ++i) {
            os << g10(te.samples[i].r) << "," << g10(te.log_ratios[i]) << "\n";
          }
        });
      }
      return kExitPass;
    }

    if (*solve || *resid) {
      const OdeProblem p = load_problem(problem);
      const LogSeries s = solve_series(p, n_terms);
      const Guard guard = no_guard ? Guard::Bypass : Guard::Enforce;
      out << "terms = " << s.size() << "\n";
      out << "r_reliable = " << g10(s.r_reliable) << "\n";
      if (*solve) {
        if (eval_r) {
          const LogComplex v = eval_series_polar(s, *eval_r, theta, deriv, guard);
          out << "logmag = " << g10(v.logmag) << "\n";
          out << "phase = " << g10(v.phase) << "\n";
        }
        with_output(csv, out, [&](std::ostream& os) { write_series_csv(os, s); });
      } else {
        out << "residual = " << g10(residual(p, s, r, n_theta_res, guard)) << "\n";
        if (p.solution) {
          double worst = 0.0;
          for (int m = 0; m < n_theta_res; ++m) {
            worst = std::max(worst, closed_form_residual(p, DiscPoint::polar(r, kTwoPi * m / n_theta_res)));
          }
          out << "closed_form_residual = " << g10(worst) << "\n";
        }
      }
      return kExitPass;
    }

    if (*bound) {
      const OdeProblem p = load_problem(problem);
      HeittokangasOptions ho;
      ho.eps = eps;
      std::optional<LogSeries> s;
      if (nu > 0 && !p.solution) s = solve_series(p, n_terms);
      const LogSeries* sp = s ? &*s : nullptr;
      const HeittokangasBound b = heittokangas_bound(p, r, theta, nu, ho, sp);
      out << "log_C = " << g10(b.log_C) << "\n";
      out << "log_I = " << g10(b.log_I) << "\n";
      out << "n_c = " << b.n_c << "\n";
      out << "log_bound = " << g10(b.log_bound.value()) << "\n";
      with_output(csv, out, [&](std::ostream& os) {
        const RadialGrid g{};
        os << "r,log_C,log_I,log_bound\n";
        for (int i = 0; i < g.n; ++i) {
          if (g.r(i) <= nu) continue;
          const HeittokangasBound bi = heittokangas_bound(p, g.r(i), theta, nu, ho, sp);
          os << g10(g.r(i)) << "," << g10(bi.log_C) << "," << g10(bi.log_I) << ","
             << g10(bi.log_bound.value()) << "\n";
        }
      });
      return kExitPass;
    }

    if (*measure) {
      const ScaleTriple t = parse_triple(triple_s);
      const Expr f = parse_expr(func);
      const RadialGrid g = trimmed(f, gm.grid(), err);
      const GrowthOptions o = gm.opts();
      if (kind == "lower" || kind == "typed") {
        std::optional<TypedThreshold> th;
        if (kind == "typed") th = TypedThreshold{omega, rho_t};
        const LowerSetReport rep = lower_set_measure(f, t, mu, g, th, o);
        out << (th ? "type = " : "order = ") << g10(rep.measured) << "\n";
        out << "log_measure = " << g10(rep.measure) << "\n";
        out << "infinite_surrogate = " << (rep.infinite_surrogate ? "true" : "false") << "\n";
        with_output(csv, out, [&](std::ostream& os) {
          os << "r,holds,cumulative\n";
          for (std::size_t i = 0; i < rep.r.size(); ++i) {
            os << g10(rep.r[i]) << "," << (rep.holds[i] ? 1 : 0) << "," << g10(rep.cumulative[i]) << "\n";
          }
        });
      } else {
        const BoundReport rep = kind == "logderiv" ? log_derivative_check(f, k, j, g, d, eps, o)
                                                   : proximity_bound_check(f, k, t, g, eps, o);
        out << "log_measure = " << g10(rep.measure) << "\n";
        if (kind == "proximity") {
          out << "rho_used = " << g10(rep.rho_used) << "\n";
          out << "log_K = " << g10(rep.log_K) << "\n";
        }
        with_output(csv, out, [&](std::ostream& os) { write_bound_csv(os, rep); });
      }
      return kExitPass;
    }

    if (*verify) {
      HarnessConfig cfg = config.empty() ? HarnessConfig{} : load_config(config);
      if (threads) cfg.opts.threads = std::max(1, *threads);
      if (!outdir.empty()) cfg.outdir = outdir;
      if (plot) cfg.plot = true;
      std::vector<std::string> names;
      if (scenario == "all") {
        names = scenario_names();
      } else if (std::find(scenario_names().begin(), scenario_names().end(), scenario) !=
                 scenario_names().end()) {
        names = {scenario};
      } else {
        err << "error: unknown scenario '" << scenario << "'\n";
        return kExitUsage;
      }
      bool all_pass = true;
      for (const auto& name : names) {
        const ScenarioReport rep = run_named(name, cfg);
        out << rep.text();
        if (names.size() > 1) out << "\n";
        if (!no_bundle) write_bundle(rep, cfg.outdir + "/" + name, cfg.plot);
        all_pass = all_pass && rep.pass();
      }
      return all_pass ? kExitPass : kExitVerdict;
    }

    if (*cat) {
      for (const auto& c : catalog()) out << c.name << "\t" << to_string(c.expr) << "\n";
      return kExitPass;
    }

    if (*chk) {
      const ClassReport rep = check_triple(parse_triple(triple_s), p_max);
      out << describe(rep);
      return rep.pass ? kExitPass : kExitVerdict;
    }
  } catch (const ReliabilityError& e) {
    err << "error: " << e.what() << "\n";
    err << "guard radius = " << g10(e.guard_radius()) << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace abg
