#include "abg/growth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "abg/errors.hpp"
#include "abg/quad.hpp"

namespace abg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void RadialGrid::validate() const {
  if (!(r0 > 0 && r0 < 1)) fail(ErrorKind::Argument, "grid r0 must lie in (0,1)");
  if (!(q > 0 && q < 1)) fail(ErrorKind::Argument, "grid q must lie in (0,1)");
  if (n < 1) fail(ErrorKind::Argument, "grid needs at least one radius");
  if (!(one_minus_r(n - 1) > 0)) fail(ErrorKind::Argument, "grid reaches r = 1");
}

double RadialGrid::one_minus_r(int i) const { return (1.0 - r0) * std::pow(q, i); }

const char* to_string(OrderMode m) {
  switch (m) {
    case OrderMode::M_order: return "M_order";
    case OrderMode::T_order: return "T_order";
    case OrderMode::M_logorder: return "M_logorder";
    case OrderMode::T_logorder: return "T_logorder";
  }
  return "?";
}

OrderMode parse_mode(const std::string& s) {
  if (s == "M" || s == "M_order") return OrderMode::M_order;
  if (s == "T" || s == "T_order") return OrderMode::T_order;
  if (s == "Mlog" || s == "M_logorder") return OrderMode::M_logorder;
  if (s == "Tlog" || s == "T_logorder") return OrderMode::T_logorder;
  fail(ErrorKind::Parse, "unknown mode '" + s + "' (expected M, T, Mlog or Tlog)");
}

bool uses_T(OrderMode m) { return m == OrderMode::T_order || m == OrderMode::T_logorder; }

double GrowthSample::log3M() const {
  const double ll = loglogM();
  return ll > 0 ? std::log(ll) : kNegInf;
}

GrowthSample max_modulus(Evaluator& ev, double one_minus_r, int n_theta) {
  if (n_theta < 64) fail(ErrorKind::Argument, "max_modulus needs n_theta >= 64");
  GrowthSample s;
  s.one_minus_r = one_minus_r;
  s.r = 1.0 - one_minus_r;
  auto value = [&](double theta) { return ev.log_abs(DiscPoint::polar_1mr(one_minus_r, theta)); };

  LogModulus best = value(0.0);
  double best_theta = 0.0;
  for (int j = 1; j < n_theta; ++j) {
    const double th = wrap_phase(kTwoPi * j / n_theta);
    const LogModulus v = value(th);
    if (best < v) {
      best = v;
      best_theta = th;
    }
  }
  // Golden-section refinement on the bracket around the best node.
  const double h = kTwoPi / n_theta;
  double a = best_theta - h, b = best_theta + h;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  LogModulus f1 = value(x1), f2 = value(x2);
  auto consider = [&](double th, const LogModulus& v) {
    if (best < v) {
      best = v;
      best_theta = wrap_phase(th);
    }
  };
  consider(x1, f1);
  consider(x2, f2);
  while (b - a > 1e-10) {
    if (f2 < f1) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = value(x1);
      consider(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = value(x2);
      consider(x2, f2);
    }
  }
  s.log_M = best;
  s.theta_argmax = best_theta;
  return s;
}

GrowthSample max_modulus(const Expr& f, double r, int n_theta) {
  if (!(r > 0 && r < 1)) fail(ErrorKind::Domain, "radius must lie in (0,1)");
  Evaluator ev(f);
  return max_modulus(ev, 1.0 - r, n_theta);
}

void characteristic(Evaluator& ev, GrowthSample& s, double rel) {
  if (s.log_M.sign <= 0) {
    s.log_T = kNegInf;  // |f| <= 1 on the circle
    return;
  }
  auto log_integrand = [&](double theta) {
    return ev.log_abs(DiscPoint::polar_1mr(s.one_minus_r, theta)).loglog();
  };
  LogQuadOptions o;
  o.rel = rel;
  o.offset = -std::log(kTwoPi);
  const double c = s.theta_argmax;
  const LogQuadResult q = log_integrate(log_integrand, {c - kPi, c, c + kPi}, o);
  if (!q.converged) {
    fail(ErrorKind::OutOfRegime, "T quadrature did not converge at r = " + std::to_string(s.r));
  }
  s.log_T = q.log_value - std::log(kTwoPi);
}

GrowthSample characteristic(const Expr& f, double r, int n_theta) {
  Evaluator ev(f);
  GrowthSample s = max_modulus(f, r, n_theta);
  characteristic(ev, s);
  return s;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(threads, n);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::vector<GrowthSample> sample_grid(const Expr& f, const RadialGrid& g, bool with_T,
                                      const GrowthOptions& opts) {
  g.validate();
  std::vector<GrowthSample> out(g.n);
  parallel_for(g.n, opts.threads, [&](int i) {
    const double omr = g.one_minus_r(i);
    try {
      Evaluator ev(f);
      GrowthSample s = max_modulus(ev, omr, opts.n_theta);
      if (with_T) characteristic(ev, s, opts.quad_rel);
      out[i] = s;
    } catch (const Error& e) {
      out[i].one_minus_r = omr;
      out[i].r = 1.0 - omr;
      out[i].error = e.what();
    }
  });
  return out;
}

double order_numerator(const GrowthSample& s, const ScaleTriple& t, OrderMode mode) {
  if (!s.ok()) return kNaN;
  switch (mode) {
    case OrderMode::M_order: return t.alpha(s.loglogM());
    case OrderMode::M_logorder: return t.alpha(s.log3M());
    case OrderMode::T_order:
      if (std::isnan(s.log_T)) return kNaN;
      return t.alpha(s.log_T);
    case OrderMode::T_logorder:
      if (std::isnan(s.log_T)) return kNaN;
      return t.alpha(s.log_T > 0 ? std::log(s.log_T) : kNegInf);
  }
  return kNaN;
}

OrderEstimate estimate_from(const std::vector<double>& num, const std::vector<double>& den,
                            int tail_k) {
  if (num.size() != den.size()) fail(ErrorKind::Argument, "numerator/denominator length mismatch");
  if (tail_k < 4) fail(ErrorKind::Argument, "tail_k must be at least 4");
  OrderEstimate e;
  const std::size_t n = num.size();
  e.numerators = num;
  e.denominators = den;
  e.ratios.assign(n, kNaN);
  e.valid.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(num[i]) && std::isfinite(den[i]) && den[i] > 0) {
      e.valid[i] = true;
      e.ratios[i] = num[i] / den[i];
    }
  }
  const std::size_t start = n > static_cast<std::size_t>(tail_k) ? n - tail_k : 0;
  std::vector<std::size_t> tail;
  for (std::size_t i = start; i < n; ++i) {
    if (e.valid[i]) tail.push_back(i);
  }
  if (tail.size() < 4) {
    fail(ErrorKind::Estimation, "only " + std::to_string(tail.size()) +
                                    " valid points in the estimation tail (need 4)");
  }
  double md = 0, mn = 0;
  for (auto i : tail) {
    md += den[i];
    mn += num[i];
  }
  md /= tail.size();
  mn /= tail.size();
  double sxx = 0, sxy = 0;
  for (auto i : tail) {
    sxx += (den[i] - md) * (den[i] - md);
    sxy += (den[i] - md) * (num[i] - mn);
  }
  e.slope = sxx > 0 ? sxy / sxx : 0.0;
  e.intercept = mn - e.slope * md;
  e.raw_tail_max = -std::numeric_limits<double>::infinity();
  double corrected = -std::numeric_limits<double>::infinity();
  for (auto i : tail) {
    e.raw_tail_max = std::max(e.raw_tail_max, e.ratios[i]);
    corrected = std::max(corrected, (num[i] - e.intercept) / den[i]);
  }
  e.value = std::max(0.0, corrected);
  e.tail_used = static_cast<int>(tail.size());
  return e;
}

OrderEstimate order_from_samples(const std::vector<GrowthSample>& samples, const ScaleTriple& t,
                                 OrderMode mode, int tail_k) {
  std::vector<double> num, den;
  for (const auto& s : samples) {
    num.push_back(order_numerator(s, t, mode));
    den.push_back(t.denominator(s.one_minus_r));
  }
  OrderEstimate e = estimate_from(num, den, tail_k);
  e.mode = mode;
  e.samples = samples;
  return e;
}

OrderEstimate order_estimate(const Expr& f, const ScaleTriple& t, const RadialGrid& g,
                             OrderMode mode, const GrowthOptions& opts) {
  return order_from_samples(sample_grid(f, g, uses_T(mode), opts), t, mode, opts.tail_k);
}

TypeEstimate type_from_samples(const std::vector<GrowthSample>& samples, const ScaleTriple& t,
                               OrderMode mode, double rho, int tail_k) {
  if (!(rho > 0 && std::isfinite(rho))) fail(ErrorKind::Argument, "type needs 0 < rho < inf");
  TypeEstimate te;
  te.mode = mode;
  te.rho_used = rho;
  te.samples = samples;
  const std::size_t n = samples.size();
  for (const auto& s : samples) {
    const double num = order_numerator(s, t, mode);
    const double den = t.denominator(s.one_minus_r);
    te.log_ratios.push_back(std::isfinite(num) && std::isfinite(den) ? num - rho * den : kNaN);
  }
  const std::size_t start = n > static_cast<std::size_t>(tail_k) ? n - tail_k : 0;
  double best = -std::numeric_limits<double>::infinity();
  int used = 0;
  for (std::size_t i = start; i < n; ++i) {
    if (std::isfinite(te.log_ratios[i])) {
      best = std::max(best, te.log_ratios[i]);
      ++used;
    }
  }
  if (used < 4) {
    fail(ErrorKind::Estimation, "only " + std::to_string(used) +
                                    " valid points in the type estimation tail (need 4)");
  }
  te.value = std::exp(best);
  return te;
}

TypeEstimate type_estimate(const Expr& f, const ScaleTriple& t, const RadialGrid& g,
                           OrderMode mode, double rho, const GrowthOptions& opts) {
  return type_from_samples(sample_grid(f, g, uses_T(mode), opts), t, mode, rho, opts.tail_k);
}

Ineq12Report verify_ineq_12(const Expr& f, const RadialGrid& g, const GrowthOptions& opts) {
  g.validate();
  Ineq12Report rep;
  rep.rows.resize(g.n);
  parallel_for(g.n, opts.threads, [&](int i) {
    Ineq12Row& row = rep.rows[i];
    const double omr = g.one_minus_r(i);
    row.r = 1.0 - omr;
    try {
      Evaluator ev(f);
      GrowthSample s = max_modulus(ev, omr, opts.n_theta);
      characteristic(ev, s, opts.quad_rel);
      GrowthSample sh = max_modulus(ev, 0.5 * omr, opts.n_theta);
      characteristic(ev, sh, opts.quad_rel);
      const double lpm = std::max(0.0, s.logM());
      row.log_plus_M = lpm;
      row.T = s.T();
      row.T_shift = sh.T();
      const double ll = s.log_M.sign > 0 ? s.loglogM() : kNegInf;  // log log+M
      const double slack = 1e-12 * std::max(1.0, std::abs(ll));
      bool left_ok, right_ok;
      if (ll == kNegInf) {
        row.margin_left = s.log_T == kNegInf ? 0.0 : -std::numeric_limits<double>::infinity();
        left_ok = s.log_T == kNegInf;
        row.margin_right = std::numeric_limits<double>::infinity();
        right_ok = true;
      } else {
        row.margin_left = ll - s.log_T;
        left_ok = row.margin_left >= -slack;
        row.margin_right = std::log1p(3.0 * row.r) - std::log(omr) + sh.log_T - ll;
        right_ok = row.margin_right >= -slack;
      }
      row.ok = left_ok && right_ok;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  rep.pass = true;
  for (const auto& row : rep.rows) {
    if (!row.error.empty()) continue;
    ++rep.evaluated;
    rep.pass = rep.pass && row.ok;
  }
  rep.pass = rep.pass && rep.evaluated > 0;
  return rep;
}

Prop11Report proposition11_check(const Expr& f, const ScaleTriple& t, const RadialGrid& g,
                                 const GrowthOptions& opts) {
  const auto samples = sample_grid(f, g, true, opts);
  Prop11Report r;
  r.m_based = order_from_samples(samples, t, OrderMode::M_logorder, opts.tail_k);
  r.t_based = order_from_samples(samples, t, OrderMode::T_logorder, opts.tail_k);
  r.difference = std::abs(r.m_based.value - r.t_based.value);
  return r;
}

int evaluable_prefix(const Expr& f, const RadialGrid& g, int n_theta) {
  g.validate();
  Evaluator ev(f);
  for (int i = 0; i < g.n; ++i) {
    try {
      const double omr = g.one_minus_r(i);
      for (int j = 0; j < n_theta; ++j) ev.log_abs(DiscPoint::polar_1mr(omr, kTwoPi * j / n_theta));
    } catch (const Error&) {
      return i;
    }
  }
  return g.n;
}

void write_growth_csv(std::ostream& os, const OrderEstimate& est) {
  os << "r,one_minus_r,logM,loglogM,log3M,T,ratio,mode\n";
  for (std::size_t i = 0; i < est.samples.size(); ++i) {
    const GrowthSample& s = est.samples[i];
    os << fmt(s.r) << ',' << fmt(s.one_minus_r) << ',';
    if (s.ok()) {
      os << fmt(s.logM()) << ',' << fmt(s.loglogM()) << ',' << fmt(s.log3M()) << ','
         << fmt(std::isnan(s.log_T) ? kNaN : s.T());
    } else {
      os << ",,,";
    }
    os << ',' << fmt(i < est.ratios.size() ? est.ratios[i] : kNaN) << ',' << to_string(est.mode)
       << '\n';
  }
}

}  // namespace abg
