#include "abg/ode.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "abg/errors.hpp"

namespace abg {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Split on commas that are not inside parentheses.
std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double log_falling(std::size_t n, std::size_t j) {
  // log(n! / (n-j)!)
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(n - j) + 1);
}

}  // namespace

void OdeProblem::validate() const {
  if (k < 2) fail(ErrorKind::Argument, "equation order k must be at least 2");
  if (static_cast<int>(coeffs.size()) != k) {
    fail(ErrorKind::Argument, "expected " + std::to_string(k) + " coefficients, got " +
                                  std::to_string(coeffs.size()));
  }
  if (!ic.empty() && static_cast<int>(ic.size()) != k) {
    fail(ErrorKind::Argument, "expected " + std::to_string(k) + " initial conditions, got " +
                                  std::to_string(ic.size()));
  }
}

std::vector<LogComplex> OdeProblem::initial_conditions() const {
  if (!ic.empty()) return ic;
  std::vector<LogComplex> e(k);
  e[0] = LogComplex::one();
  return e;
}

std::vector<int> OdeProblem::nonzero_coeffs() const {
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(coeffs.size()); ++j) {
    if (!coeffs[j].is_const(0.0)) out.push_back(j);
  }
  return out;
}

LogSeries solve_series(const OdeProblem& p, std::size_t n) {
  p.validate();
  if (n > kMaxSeriesTerms) {
    fail(ErrorKind::Size, "series length " + std::to_string(n) + " exceeds the cap " +
                              std::to_string(kMaxSeriesTerms));
  }
  const std::size_t k = static_cast<std::size_t>(p.k);
  if (n < k) fail(ErrorKind::Argument, "series length must be at least k");

  std::vector<LogVec> a(k);
  for (std::size_t j = 0; j < k; ++j) a[j] = LogVec(taylor(p.coeffs[j], n - k).coeffs);

  // c_n = f^(n)(0)/n!
  std::vector<LogComplex> c(n);
  const auto ic = p.initial_conditions();
  std::vector<LogVec> d(k);  // d_j[m] = (m+j)!/m! c_{m+j}
  auto publish = [&](std::size_t t) {
    for (std::size_t j = 0; j <= std::min(t, k - 1); ++j) {
      LogComplex v = c[t];
      if (!v.is_zero()) v.logmag += log_falling(t, j);
      d[j].push(v);  // entry m = t - j
    }
  };
  for (std::size_t t = 0; t < k; ++t) {
    c[t] = ic[t];
    if (!c[t].is_zero()) c[t].logmag -= std::lgamma(static_cast<double>(t) + 1);
    publish(t);
  }
  for (std::size_t m = 0; m + k < n; ++m) {
    LogComplex s = LogComplex::zero();
    for (std::size_t j = 0; j < k; ++j) s = lc_add(s, conv_at(a[j], d[j], m, 0, m));
    LogComplex next = lc_neg(s);
    if (!next.is_zero()) next.logmag -= log_falling(m + k, k);
    c[m + k] = next;
    publish(m + k);
  }
  LogSeries out;
  out.coeffs = std::move(c);
  out.r_reliable = reliable_radius(out.coeffs);
  return out;
}

double residual(const OdeProblem& p, const LogSeries& s, double r_check, int n_theta, Guard guard) {
  p.validate();
  if (n_theta < 1) fail(ErrorKind::Argument, "residual needs n_theta >= 1");
  if (guard == Guard::Enforce && r_check > s.r_reliable) throw ReliabilityError(r_check, s.r_reliable);
  std::vector<Evaluator> coeff;
  for (const auto& a : p.coeffs) coeff.emplace_back(a);
  double worst = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    const double th = kTwoPi * i / n_theta;
    const DiscPoint z = DiscPoint::polar(r_check, th);
    std::vector<LogComplex> terms;
    terms.push_back(eval_series_polar(s, r_check, th, p.k, guard));
    for (int j = 0; j < p.k; ++j) {
      if (p.coeffs[j].is_const(0.0)) continue;
      terms.push_back(lc_mul(coeff[j].value(z), eval_series_polar(s, r_check, th, j, guard)));
    }
    const LogComplex num = lse_sum(terms);
    double den_max = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) den_max = std::max(den_max, t.logmag);
    if (den_max == -std::numeric_limits<double>::infinity()) continue;
    double den = 0.0;
    for (const auto& t : terms) den += std::exp(t.logmag - den_max);
    worst = std::max(worst, std::exp(num.logmag - den_max - std::log(den)));
  }
  return worst;
}

double closed_form_residual(const OdeProblem& p, const DiscPoint& z) {
  p.validate();
  if (!p.solution || p.solution->kind() != NodeKind::Exp) {
    fail(ErrorKind::Precondition, "closed-form residual needs an Exp-rooted solution");
  }
  const auto d = log_derivative_ratios(*p.solution, p.k);
  std::vector<LogComplex> terms{eval_log(d[p.k], z)};
  for (int j = 0; j < p.k; ++j) {
    if (p.coeffs[j].is_const(0.0)) continue;
    terms.push_back(lc_mul(eval_log(p.coeffs[j], z), eval_log(d[j], z)));
  }
  const LogComplex num = lse_sum(terms);
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) mx = std::max(mx, t.logmag);
  if (mx == -std::numeric_limits<double>::infinity()) return 0.0;
  double den = 0.0;
  for (const auto& t : terms) den += std::exp(t.logmag - mx);
  return std::exp(num.logmag - mx - std::log(den));
}

OdeProblem manufacture(const Expr& f, const std::vector<Expr>& higher, int k) {
  if (f.kind() != NodeKind::Exp) fail(ErrorKind::Argument, "manufacture needs f = exp(g)");
  if (k < 2) fail(ErrorKind::Argument, "equation order k must be at least 2");
  if (static_cast<int>(higher.size()) != k - 1) {
    fail(ErrorKind::Argument, "manufacture needs k-1 higher coefficients A_1..A_{k-1}");
  }
  const auto d = log_derivative_ratios(f, k);
  Expr sum = d[k];
  for (int j = 1; j < k; ++j) sum = add(sum, mul(higher[j - 1], d[j]));
  OdeProblem p;
  p.k = k;
  p.coeffs.push_back(neg(sum));
  for (const auto& h : higher) p.coeffs.push_back(h);
  const DiscPoint origin = DiscPoint::polar(0.0, 0.0);
  const LogComplex f0 = eval_log(f, origin);
  for (int j = 0; j < k; ++j) p.ic.push_back(lc_mul(eval_log(d[j], origin), f0));
  p.solution = f;
  return p;
}

OdeProblem parse_problem(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::Parse, "problem line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) fail(ErrorKind::Parse, "problem key '" + key + "' given twice");
    kv[key] = trim(line.substr(eq + 1));
  }
  if (!kv.count("k")) fail(ErrorKind::Parse, "problem file needs k");
  OdeProblem p;
  {
    const std::string& ks = kv["k"];
    char* end = nullptr;
    const long k = std::strtol(ks.c_str(), &end, 10);
    if (*end != '\0' || k < 2 || k > 64) fail(ErrorKind::Parse, "k must be an integer in 2..64");
    p.k = static_cast<int>(k);
  }
  for (const auto& [key, value] : kv) {
    if (key == "k" || key == "ic" || key == "solution" || key == "manufacture") continue;
    bool known = false;
    if (key.size() > 1 && key[0] == 'A') {
      char* end = nullptr;
      const long j = std::strtol(key.c_str() + 1, &end, 10);
      known = *end == '\0' && j >= 0 && j < p.k;
    }
    if (!known) fail(ErrorKind::Parse, "unknown problem key '" + key + "'");
  }
  auto coeff = [&](int j) {
    const auto it = kv.find("A" + std::to_string(j));
    return it == kv.end() ? Expr::constant(0.0) : parse_expr(it->second);
  };
  if (kv.count("manufacture")) {
    if (kv.count("A0")) fail(ErrorKind::Parse, "A0 is derived when manufacture is given");
    if (kv.count("ic")) fail(ErrorKind::Parse, "ic is derived when manufacture is given");
    std::vector<Expr> higher;
    for (int j = 1; j < p.k; ++j) higher.push_back(coeff(j));
    return manufacture(parse_expr(kv["manufacture"]), higher, p.k);
  }
  if (!kv.count("A0")) fail(ErrorKind::Parse, "problem file needs A0 (or manufacture)");
  for (int j = 0; j < p.k; ++j) p.coeffs.push_back(coeff(j));
  if (kv.count("ic")) {
    for (const auto& item : split_top(kv["ic"])) {
      const Expr e = parse_expr(item);
      if (!e.is_const()) fail(ErrorKind::Parse, "initial condition '" + item + "' is not a constant");
      p.ic.push_back(LogComplex::from_complex(e.value()));
    }
  }
  if (kv.count("solution")) p.solution = parse_expr(kv["solution"]);
  p.validate();
  return p;
}

OdeProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Argument, "cannot open problem file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

void write_series_csv(std::ostream& os, const LogSeries& s) {
  os << "n,logmag,phase\n";
  char buf[96];
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, s.coeffs[i].logmag, s.coeffs[i].phase);
    os << buf;
  }
}

}  // namespace abg
