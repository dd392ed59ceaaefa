#include "abg/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "abg/errors.hpp"
#include "abg/quad.hpp"

namespace abg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double cell_end(const RadialGrid& g, int i) {
  return i + 1 < g.n ? g.r(i + 1) : 1.0 - g.one_minus_r(i) * g.q;
}

// log of exp(alpha^-1(y)), with the generalized inverse at the cap.
double alpha_inverse_or_cap(const ScaleFn& a, double y) {
  if (y <= a.cap_value()) return a.cap_x0();
  return a.inverse(y);
}

void finish(BoundReport& rep, const RadialGrid& g) {
  rep.margin.resize(rep.r.size());
  rep.violate.resize(rep.r.size());
  for (std::size_t i = 0; i < rep.r.size(); ++i) {
    const double m = rep.rhs_log[i] - rep.lhs_log[i];
    rep.margin[i] = std::isnan(m) && rep.lhs_log[i] == kNegInf ? kPosInf : m;
    rep.violate[i] = rep.margin[i] < 0;
  }
  rep.violations = cells_from_mask(g, rep.violate);
  rep.measure = log_measure(rep.violations);
}

}  // namespace

void ExceptionalSet::add(double lo, double hi) {
  if (!(lo <= hi)) fail(ErrorKind::Argument, "interval with lo > hi");
  if (!intervals.empty() && lo >= intervals.back().lo && lo <= intervals.back().hi) {
    intervals.back().hi = std::max(intervals.back().hi, hi);
    return;
  }
  intervals.push_back({lo, hi});
}

double log_measure(const ExceptionalSet& s) {
  std::vector<Interval> v = s.intervals;
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i].lo >= 0 && v[i].lo <= v[i].hi && v[i].hi < 1)) {
      fail(ErrorKind::Argument, "interval [" + fmt(v[i].lo) + ", " + fmt(v[i].hi) +
                                    "] is not a subinterval of [0,1)");
    }
    if (i > 0 && v[i].lo < v[i - 1].hi) {
      fail(ErrorKind::Argument, "overlapping intervals in exceptional set");
    }
    total += std::log1p(-v[i].lo) - std::log1p(-v[i].hi);
  }
  return total;
}

ExceptionalSet cells_from_mask(const RadialGrid& g, const std::vector<bool>& mask) {
  ExceptionalSet s;
  for (int i = 0; i < g.n && i < static_cast<int>(mask.size()); ++i) {
    if (mask[i]) s.add(g.r(i), cell_end(g, i));
  }
  return s;
}

void write_bound_csv(std::ostream& os, const BoundReport& rep) {
  os << "r,lhs_log,rhs_log,margin,violate\n";
  for (std::size_t i = 0; i < rep.r.size(); ++i) {
    os << fmt(rep.r[i]) << ',' << fmt(rep.lhs_log[i]) << ',' << fmt(rep.rhs_log[i]) << ','
       << fmt(rep.margin[i]) << ',' << (rep.violate[i] ? 1 : 0) << '\n';
  }
  os << "# intervals:";
  for (const auto& iv : rep.violations.intervals) os << " [" << fmt(iv.lo) << "," << fmt(iv.hi) << ")";
  os << "\n# log_measure: " << fmt(rep.measure) << "\n";
}

HeittokangasBound heittokangas_bound(const OdeProblem& p, double r, double theta, double nu,
                                     const HeittokangasOptions& opts, const LogSeries* series) {
  p.validate();
  if (!(nu >= 0 && nu < r && r < 1)) fail(ErrorKind::Argument, "bound needs 0 <= nu < r < 1");
  const auto nz = p.nonzero_coeffs();
  if (nz.empty()) fail(ErrorKind::Precondition, "all coefficients vanish identically");
  HeittokangasBound hb;
  hb.n_c = static_cast<int>(nz.size());
  const double k = p.k;

  std::vector<Evaluator> ev;
  for (int j : nz) ev.emplace_back(p.coeffs[j]);
  const DiscPoint z0 = DiscPoint::polar(nu, theta);
  double a_max = kNegInf;
  for (auto& e : ev) a_max = std::max(a_max, e.value(z0).logmag);
  if (a_max == kNegInf) {
    fail(ErrorKind::Precondition, "every coefficient vanishes at nu e^{i theta}");
  }

  if (opts.log_C_override) {
    hb.log_C = *opts.log_C_override;
  } else {
    std::vector<double> log_fj(p.k);
    if (nu == 0.0) {
      const auto ic = p.initial_conditions();
      for (int j = 0; j < p.k; ++j) log_fj[j] = ic[j].logmag;
    } else if (p.solution) {
      const auto d = log_derivative_ratios(*p.solution, p.k - 1);
      const double lf = log_abs(*p.solution, z0).value();
      for (int j = 0; j < p.k; ++j) log_fj[j] = eval_log(d[j], z0).logmag + lf;
    } else if (series) {
      for (int j = 0; j < p.k; ++j) log_fj[j] = eval_series_polar(*series, nu, theta, j).logmag;
    } else {
      fail(ErrorKind::Precondition, "nu > 0 needs a closed-form solution or a series");
    }
    double best = kNegInf;
    for (int j = 0; j < p.k; ++j) {
      best = std::max(best, log_fj[j] - j * std::log(static_cast<double>(hb.n_c)) -
                                (j / (k - j)) * a_max);
    }
    hb.log_C = std::log1p(opts.eps) + best;
  }

  auto log_integrand = [&](double t) {
    const DiscPoint z = DiscPoint::polar(t, theta);
    double m = kNegInf;
    for (std::size_t i = 0; i < nz.size(); ++i) {
      m = std::max(m, ev[i].value(z).logmag / (k - nz[i]));
    }
    return m;
  };
  std::vector<double> breaks{nu};
  for (int i = 1; i < 48; ++i) {
    const double t = r - (r - nu) * std::ldexp(1.0, -i);
    if (!(t > breaks.back()) || r - t < 1e-14) break;
    breaks.push_back(t);
  }
  breaks.push_back(r);
  LogQuadOptions qo;
  qo.rel = opts.rel;
  qo.initial_panels = opts.initial_panels;
  const LogQuadResult q = log_integrate(log_integrand, breaks, qo);
  if (!q.converged) {
    fail(ErrorKind::OutOfRegime, "coefficient integral did not converge at r = " + std::to_string(r));
  }
  hb.log_I = q.log_value;
  const LogModulus exponent =
      q.log_value == kNegInf ? LogModulus{0, kNegInf}
                             : LogModulus{1, std::log(static_cast<double>(hb.n_c)) + q.log_value};
  hb.log_bound = LogModulus::from_log_abs(hb.log_C) + exponent;
  if (hb.log_C == kNegInf) hb.log_bound = LogModulus::of_zero();
  return hb;
}

OrderEstimate order_of_bound(const OdeProblem& p, const ScaleTriple& t, const RadialGrid& g,
                             int n_theta, const GrowthOptions& opts) {
  g.validate();
  if (n_theta < 1) fail(ErrorKind::Argument, "order_of_bound needs n_theta >= 1");
  std::vector<GrowthSample> samples(g.n);
  parallel_for(g.n, opts.threads, [&](int i) {
    GrowthSample& s = samples[i];
    s.one_minus_r = g.one_minus_r(i);
    s.r = g.r(i);
    try {
      HeittokangasOptions ho;
      ho.initial_panels = 2;
      bool first = true;
      for (int m = 0; m < n_theta; ++m) {
        const double th = kTwoPi * m / n_theta;
        const HeittokangasBound hb = heittokangas_bound(p, s.r, th, 0.0, ho);
        if (first || s.log_M < hb.log_bound) {
          s.log_M = hb.log_bound;
          s.theta_argmax = wrap_phase(th);
          first = false;
        }
      }
    } catch (const Error& e) {
      s.error = e.what();
    }
  });
  return order_from_samples(samples, t, OrderMode::M_logorder, opts.tail_k);
}

BoundReport log_derivative_check(const Expr& f, int k, int j, const RadialGrid& g, double d,
                                 double eps, const GrowthOptions& opts) {
  g.validate();
  if (!(k > j && j >= 0)) fail(ErrorKind::Argument, "log-derivative check needs k > j >= 0");
  if (!(d > 0 && d < 1)) fail(ErrorKind::Argument, "shift parameter d must lie in (0,1)");
  if (!(eps > 0)) fail(ErrorKind::Argument, "eps must be positive");
  const auto D = log_derivative_ratios(f, k);
  BoundReport rep;
  rep.label = "log-derivative k=" + std::to_string(k) + " j=" + std::to_string(j);
  rep.r.resize(g.n);
  rep.lhs_log.assign(g.n, kNaN);
  rep.rhs_log.assign(g.n, kNaN);
  parallel_for(g.n, opts.threads, [&](int i) {
    const double omr = g.one_minus_r(i);
    rep.r[i] = 1.0 - omr;
    try {
      Evaluator ef(f), dk(D[k]), dj(D[j]);
      const GrowthSample s = max_modulus(ef, omr, opts.n_theta);
      const DiscPoint z = DiscPoint::polar_1mr(omr, s.theta_argmax);
      rep.lhs_log[i] = dk.value(z).logmag - dj.value(z).logmag;
      GrowthSample sh = max_modulus(ef, d * omr, opts.n_theta);
      characteristic(ef, sh, opts.quad_rel);
      const double l = -std::log(omr);
      rep.rhs_log[i] = (k - j) * ((2.0 + eps) * l + std::max(std::log(l), sh.log_T));
    } catch (const Error&) {
      rep.lhs_log[i] = rep.rhs_log[i] = kNaN;
    }
  });
  finish(rep, g);
  return rep;
}

BoundReport proximity_bound_check(const Expr& f, int k, const ScaleTriple& t, const RadialGrid& g,
                                  double eps, const GrowthOptions& opts) {
  g.validate();
  if (k < 1) fail(ErrorKind::Argument, "proximity check needs k >= 1");
  if (!(eps > 0)) fail(ErrorKind::Argument, "eps must be positive");
  const OrderEstimate est = order_estimate(f, t, g, OrderMode::T_logorder, opts);
  const Expr dk = log_derivative_ratios(f, k)[k];
  BoundReport rep;
  rep.label = "proximity m(r, f^(" + std::to_string(k) + ")/f)";
  rep.rho_used = est.value;
  rep.r.resize(g.n);
  rep.lhs_log.assign(g.n, kNaN);
  std::vector<double> base(g.n, kNaN);
  parallel_for(g.n, opts.threads, [&](int i) {
    const double omr = g.one_minus_r(i);
    rep.r[i] = 1.0 - omr;
    base[i] = alpha_inverse_or_cap(t.alpha, (est.value + eps) * t.denominator(omr));
    try {
      Evaluator ev(dk);
      GrowthSample s = max_modulus(ev, omr, opts.n_theta);
      characteristic(ev, s, opts.quad_rel);  // m(r, D_k) is T(r, D_k) for analytic D_k
      rep.lhs_log[i] = s.log_T;
    } catch (const Error&) {
      rep.lhs_log[i] = kNaN;
    }
  });
  double log_k = 0.0;
  for (int i = 0; i < g.n / 2; ++i) {
    if (std::isfinite(rep.lhs_log[i]) && std::isfinite(base[i])) {
      log_k = std::max(log_k, rep.lhs_log[i] - base[i]);
    }
  }
  rep.log_K = log_k;
  rep.rhs_log.resize(g.n);
  for (int i = 0; i < g.n; ++i) rep.rhs_log[i] = log_k + base[i];
  finish(rep, g);
  return rep;
}

BorelShiftResult borel_shift_check(const std::vector<double>& r, const std::vector<double>& g_vals,
                                   const std::vector<double>& h_vals, const ExceptionalSet& bad,
                                   double d) {
  if (r.empty() || r.size() != g_vals.size() || r.size() != h_vals.size()) {
    fail(ErrorKind::Argument, "Borel shift check needs equally long, non-empty samples");
  }
  if (!(d > 0 && d <= 1)) fail(ErrorKind::Argument, "shift parameter d must lie in (0,1]");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) fail(ErrorKind::Argument, "sample radii must increase");
    if (g_vals[i] < g_vals[i - 1] || h_vals[i] < h_vals[i - 1]) {
      fail(ErrorKind::Argument, "Borel shift check needs non-decreasing g and h");
    }
  }
  auto in_bad = [&](double x) {
    for (const auto& iv : bad.intervals) {
      if (x >= iv.lo && x <= iv.hi) return true;
    }
    return false;
  };
  BorelShiftResult res;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!in_bad(r[i]) && g_vals[i] > h_vals[i]) res.precondition_ok = false;
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double s = 1.0 - d * (1.0 - r[i]);
    if (s > r.back()) {
      ++res.skipped;
      continue;
    }
    const auto it = std::lower_bound(r.begin(), r.end(), s);
    const std::size_t hi = static_cast<std::size_t>(it - r.begin());
    double hs;
    if (hi == 0 || *it == s) {
      hs = h_vals[hi];
    } else {
      const double w = (s - r[hi - 1]) / (r[hi] - r[hi - 1]);
      hs = h_vals[hi - 1] + w * (h_vals[hi] - h_vals[hi - 1]);
    }
    ++res.checked;
    if (g_vals[i] > hs + 1e-12 * std::abs(hs) && res.pass) {
      res.pass = false;
      res.first_violation_r = r[i];
    }
  }
  return res;
}

LowerSetReport lower_set_measure(const Expr& f, const ScaleTriple& t, double mu,
                                 const RadialGrid& g, std::optional<TypedThreshold> typed,
                                 const GrowthOptions& opts) {
  const auto samples = sample_grid(f, g, false, opts);
  LowerSetReport rep;
  if (typed) {
    rep.measured = type_from_samples(samples, t, OrderMode::M_order, typed->rho, opts.tail_k).value;
    if (!(typed->omega > 0) || typed->omega >= rep.measured) {
      fail(ErrorKind::Precondition, "omega = " + fmt(typed->omega) +
                                        " must lie in (0, measured type " + fmt(rep.measured) + ")");
    }
  } else {
    rep.measured = order_from_samples(samples, t, OrderMode::M_order, opts.tail_k).value;
    if (!(mu > 0) || mu >= rep.measured) {
      fail(ErrorKind::Precondition, "mu = " + fmt(mu) + " must lie in (0, measured order " +
                                        fmt(rep.measured) + ")");
    }
  }
  double cum = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const GrowthSample& s = samples[i];
    rep.r.push_back(s.r);
    bool holds = false;
    if (s.ok()) {
      const double num = order_numerator(s, t, OrderMode::M_order);
      const double den = t.denominator(s.one_minus_r);
      holds = typed ? num > std::log(typed->omega) + typed->rho * den : num > mu * den;
    }
    rep.holds.push_back(holds);
    if (holds) {
      const double end = cell_end(g, i);
      rep.set.add(s.r, end);
      cum += std::log1p(-s.r) - std::log1p(-end);
    }
    rep.cumulative.push_back(cum);
  }
  rep.measure = cum;
  bool nondecreasing = g.n >= 6;
  for (int i = std::max(2, g.n - 4); i < g.n && nondecreasing; ++i) {
    const double inc = rep.cumulative[i] - rep.cumulative[i - 1];
    const double prev = rep.cumulative[i - 1] - rep.cumulative[i - 2];
    if (inc < prev - 1e-12) nondecreasing = false;
  }
  rep.infinite_surrogate = rep.measure > 3.0 && nondecreasing;
  return rep;
}

}  // namespace abg
