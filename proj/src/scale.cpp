#include "abg/scale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "abg/errors.hpp"

namespace abg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, "bad number '" + text + "' in " + what);
  }
}

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(n);
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out.push_back(lo * std::exp(step * i));
  out.back() = hi;
  return out;
}

// "o(.)" surrogate: last value below threshold and non-increasing tail.
bool tends_to_zero(const std::vector<double>& seq, const SampleSpec& spec, double* last) {
  if (seq.empty()) {
    *last = std::numeric_limits<double>::quiet_NaN();
    return false;
  }
  *last = seq.back();
  const std::size_t n = seq.size();
  const std::size_t m = std::min<std::size_t>(n, std::max(spec.monotone_tail, 2));
  for (std::size_t i = n - m + 1; i < n; ++i) {
    if (seq[i] > seq[i - 1] * (1.0 + 1e-12) + 1e-300) return false;
  }
  return seq.back() <= spec.o_threshold;
}

ClassReport o_check(std::string name, const std::vector<double>& seq, const SampleSpec& spec) {
  ClassReport r;
  r.check = std::move(name);
  r.pass = tends_to_zero(seq, spec, &r.worst);
  std::ostringstream os;
  os << seq.size() << " samples, last ratio " << r.worst;
  r.note = os.str();
  return r;
}

}  // namespace

double iterated_log(double x, int p) {
  for (int i = 0; i < p; ++i) {
    if (!(x > 0)) return kNegInf;
    x = std::log(x);
  }
  return x;
}

double iterated_exp(double x, int p) {
  for (int i = 0; i < p; ++i) x = std::exp(x);
  return x;
}

ScaleFn::ScaleFn(ScaleKind kind, int p, double s, double cap_x0)
    : kind_(kind), p_(p), s_(s), cap_x0_(cap_x0) {
  cap_value_ = formula(cap_x0_);
  if (!std::isfinite(cap_value_) || cap_value_ < 0) {
    fail(ErrorKind::Argument, "scale function cap at " + std::to_string(cap_x0) +
                                  " gives a non-finite or negative value");
  }
}

ScaleFn ScaleFn::iterated_log(int p) {
  if (p < 1) fail(ErrorKind::Argument, "iterated log needs p >= 1");
  return ScaleFn(ScaleKind::IteratedLog, p, 1.0, iterated_exp(std::exp(1.0), p - 1));
}

ScaleFn ScaleFn::iterated_log(int p, double cap_x0) {
  if (p < 1) fail(ErrorKind::Argument, "iterated log needs p >= 1");
  return ScaleFn(ScaleKind::IteratedLog, p, 1.0, cap_x0);
}

ScaleFn ScaleFn::identity() { return ScaleFn(ScaleKind::Identity, 1, 1.0, 0.0); }

ScaleFn ScaleFn::power(double s) {
  if (!(s > 0 && s <= 1)) fail(ErrorKind::Argument, "power scale needs 0 < s <= 1");
  return ScaleFn(ScaleKind::PowerConcave, 1, s, 0.0);
}

double ScaleFn::formula(double x) const {
  switch (kind_) {
    case ScaleKind::IteratedLog: return abg::iterated_log(x, p_);
    case ScaleKind::Identity: return x;
    case ScaleKind::PowerConcave: return std::pow(x, s_);
  }
  return x;
}

double ScaleFn::operator()(double x) const {
  if (x <= cap_x0_) return cap_value_;
  return formula(x);
}

double ScaleFn::inverse(double y) const {
  if (y < cap_value_) {
    fail(ErrorKind::Domain, name() + ": inverse undefined below the cap value " +
                                std::to_string(cap_value_));
  }
  if (y == cap_value_) return cap_x0_;
  switch (kind_) {
    case ScaleKind::IteratedLog: return iterated_exp(y, p_);
    case ScaleKind::Identity: return y;
    case ScaleKind::PowerConcave: return std::pow(y, 1.0 / s_);
  }
  return y;
}

double ScaleFn::log_inverse(double y) const {
  if (y < cap_value_) {
    fail(ErrorKind::Domain, name() + ": inverse undefined below the cap value " +
                                std::to_string(cap_value_));
  }
  if (y == cap_value_) return std::log(cap_x0_);
  switch (kind_) {
    case ScaleKind::IteratedLog: return iterated_exp(y, p_ - 1);
    case ScaleKind::Identity: return std::log(y);
    case ScaleKind::PowerConcave: return std::log(y) / s_;
  }
  return y;
}

std::string ScaleFn::name() const {
  char buf[64];
  switch (kind_) {
    case ScaleKind::IteratedLog: std::snprintf(buf, sizeof buf, "iterlog:%d", p_); break;
    case ScaleKind::Identity: std::snprintf(buf, sizeof buf, "id"); break;
    case ScaleKind::PowerConcave: std::snprintf(buf, sizeof buf, "pow:%g", s_); break;
  }
  return buf;
}

ScaleFn parse_scale(std::string_view text) {
  const std::string t = trim(text);
  if (t == "id") return ScaleFn::identity();
  const auto colon = t.find(':');
  if (colon != std::string::npos) {
    const std::string head = t.substr(0, colon);
    const std::string arg = t.substr(colon + 1);
    if (head == "iterlog") {
      const double p = parse_number(arg, "'" + t + "'");
      if (p != std::floor(p) || p < 1) fail(ErrorKind::Parse, "iterlog needs a positive integer: " + t);
      return ScaleFn::iterated_log(static_cast<int>(p));
    }
    if (head == "pow") {
      const double s = parse_number(arg, "'" + t + "'");
      if (!(s > 0 && s <= 1)) fail(ErrorKind::Parse, "pow needs 0 < s <= 1: " + t);
      return ScaleFn::power(s);
    }
  }
  fail(ErrorKind::Parse, "unknown scale function '" + t + "' (expected iterlog:p, id or pow:s)");
}

double ScaleTriple::denominator(double one_minus_r) const {
  return beta(std::log(gamma(1.0 / one_minus_r)));
}

std::string ScaleTriple::name() const {
  return alpha.name() + "," + beta.name() + "," + gamma.name();
}

ScaleTriple parse_triple(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    parts.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) {
    fail(ErrorKind::Parse, "a triple is written alpha,beta,gamma; got '" + std::string(text) + "'");
  }
  return {parse_scale(parts[0]), parse_scale(parts[1]), parse_scale(parts[2])};
}

SampleSpec SampleSpec::defaults() {
  SampleSpec s;
  s.pair_grid = geometric(1.0, 1e12, 25);
  s.x_grid = geometric(1e3, 1e300, 40);
  return s;
}

ClassReport check_class(const std::function<double(double)>& fn, ScaleClass cls,
                        const SampleSpec& spec) {
  ClassReport r;
  switch (cls) {
    case ScaleClass::L1: {
      r.check = "L1: f(a+b) <= f(a) + f(b) + c";
      const auto& g = spec.pair_grid;
      if (g.empty()) fail(ErrorKind::Argument, "L1 check needs a non-empty pair grid");
      const std::size_t split = (3 * g.size()) / 4;
      double c_low = -std::numeric_limits<double>::infinity();
      double c_high = c_low;
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = i; j < g.size(); ++j) {
          const double fab = fn(g[i] + g[j]), fa = fn(g[i]), fb = fn(g[j]);
          double excess = fab - fa - fb;
          // rounding in the subtraction is not growth
          if (std::abs(excess) <= 1e-12 * (std::abs(fab) + std::abs(fa) + std::abs(fb))) excess = 0.0;
          if (j < split) {
            c_low = std::max(c_low, excess);
          } else if (excess > c_high) {
            c_high = excess;
            r.witness_a = g[i];
            r.witness_b = g[j];
          }
        }
      }
      const double c_all = std::max(c_low, c_high);
      r.best_constant = std::max(0.0, c_all);
      r.worst = c_all;
      const double tol = 1e-9 * (1.0 + std::abs(c_low));
      const bool bounded = c_high <= std::max(c_low, 0.0) + tol;
      r.pass = bounded && r.best_constant <= spec.l1_constant_limit;
      std::ostringstream os;
      os << "best c on grid " << r.best_constant << "; excess on lower/upper grid "
         << c_low << " / " << c_high;
      r.note = os.str();
      if (r.pass) r.witness_a = r.witness_b = 0.0;
      break;
    }
    case ScaleClass::L2: {
      r.check = "L2: f(x + d)/f(x) -> 1";
      if (spec.x_grid.empty() || spec.offsets.empty()) {
        fail(ErrorKind::Argument, "L2 check needs a non-empty x grid and offsets");
      }
      r.pass = true;
      for (double d : spec.offsets) {
        std::vector<double> seq;
        for (double x : spec.x_grid) {
          const double fx = fn(x);
          if (fx == 0.0) continue;
          seq.push_back(std::abs(fn(x + d) / fx - 1.0));
        }
        double last = 0;
        const bool ok = tends_to_zero(seq, spec, &last);
        r.worst = std::max(r.worst, last);
        if (!ok && r.pass) {
          r.pass = false;
          r.witness_a = spec.x_grid.back();
          r.witness_b = d;
        }
      }
      r.note = "largest final |ratio - 1| " + std::to_string(r.worst);
      break;
    }
    case ScaleClass::L3: {
      r.check = "L3: f(a+b) <= f(a) + f(b), f(m r) <= m f(r)";
      const auto& g = spec.pair_grid;
      if (g.empty()) fail(ErrorKind::Argument, "L3 check needs a non-empty pair grid");
      bool found = false;
      double worst = -std::numeric_limits<double>::infinity();
      auto note_violation = [&](double excess, double tol, double a, double b) {
        worst = std::max(worst, excess);
        if (excess > tol && !found) {
          found = true;
          r.witness_a = a;
          r.witness_b = b;
        }
      };
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = i; j < g.size(); ++j) {
          const double lhs = fn(g[i] + g[j]);
          note_violation(lhs - fn(g[i]) - fn(g[j]), 1e-12 * (1.0 + std::abs(lhs)), g[i], g[j]);
        }
        for (int m = 2; m <= 5; ++m) {
          const double lhs = fn(m * g[i]);
          note_violation(lhs - m * fn(g[i]), 1e-12 * (1.0 + std::abs(lhs)), g[i], m);
        }
      }
      r.worst = worst;
      r.pass = !found;
      r.note = found ? "violation at (" + std::to_string(r.witness_a) + ", " +
                           std::to_string(r.witness_b) + ")"
                     : "no violation on grid";
      break;
    }
  }
  return r;
}

ClassReport check_class(const ScaleFn& fn, ScaleClass cls, const SampleSpec& spec) {
  ClassReport r = check_class([&fn](double x) { return fn(x); }, cls, spec);
  r.check = fn.name() + " " + r.check;
  if (cls == ScaleClass::L3 && fn.concave_above_cap()) {
    r.note += "; concave and non-decreasing above the cap";
  }
  return r;
}

ClassReport check_triple_conditions(const ScaleTriple& t, int p_max, const SampleSpec& spec) {
  if (p_max < 2) fail(ErrorKind::Argument, "condition (ii) checks need p_max >= 2");
  ClassReport out;
  out.check = "condition (ii) for " + t.name();
  for (int p = 2; p <= p_max; ++p) {
    std::vector<double> seq;
    for (double x : spec.x_grid) {
      const double den = t.denominator(1.0 / x);
      if (!(den > 0)) continue;
      seq.push_back(t.alpha(iterated_log(x, p)) / den);
    }
    out.parts.push_back(o_check("(a) alpha(log^[" + std::to_string(p) + "] x) = o(beta(log gamma(x)))",
                                seq, spec));
  }
  {
    std::vector<double> seq;
    for (double x : spec.x_grid) {
      const double ax = t.alpha(x);
      if (ax == 0.0) continue;
      seq.push_back(t.alpha(std::log(x)) / ax);
    }
    out.parts.push_back(o_check("(b) alpha(log x) = o(alpha(x))", seq, spec));
  }
  {
    const ScaleFn& a = t.alpha;
    double y_hi = 1e6;
    while (y_hi > 2.0 && !(a.log_inverse(y_hi) < 1e300)) y_hi *= 0.5;
    const double y_lo = std::max(1.0, a.cap_value() + 1.0);
    for (double k : {0.25, 0.5, 0.9}) {
      std::vector<double> seq;
      if (y_hi > y_lo) {
        for (double y : geometric(y_lo, y_hi, 40)) {
          if (k * y < a.cap_value()) continue;
          seq.push_back(std::exp(a.log_inverse(k * y) - a.log_inverse(y)));
        }
      }
      char label[96];
      std::snprintf(label, sizeof label, "(c) alpha^-1(%g x) = o(alpha^-1(x))", k);
      out.parts.push_back(o_check(label, seq, spec));
    }
  }
  out.pass = std::all_of(out.parts.begin(), out.parts.end(),
                         [](const ClassReport& r) { return r.pass; });
  return out;
}

ClassReport check_triple(const ScaleTriple& t, int p_max, const SampleSpec& spec) {
  ClassReport out;
  out.check = "admissibility of " + t.name();
  out.parts.push_back(check_class(t.alpha, ScaleClass::L1, spec));
  out.parts.push_back(check_class(t.beta, ScaleClass::L2, spec));
  out.parts.push_back(check_class(t.gamma, ScaleClass::L3, spec));
  out.parts.push_back(check_triple_conditions(t, p_max, spec));
  out.pass = std::all_of(out.parts.begin(), out.parts.end(),
                         [](const ClassReport& r) { return r.pass; });
  return out;
}

std::string describe(const ClassReport& report, int indent) {
  std::ostringstream os;
  os << std::string(indent, ' ') << (report.pass ? "PASS " : "FAIL ") << report.check;
  if (!report.note.empty()) os << " [" << report.note << "]";
  os << "\n";
  for (const auto& p : report.parts) os << describe(p, indent + 2);
  return os.str();
}

}  // namespace abg
