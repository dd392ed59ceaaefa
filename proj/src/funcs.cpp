#include "abg/funcs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <unordered_map>

#include "abg/errors.hpp"

namespace abg {

using cplx = std::complex<double>;

Expr make_node(NodeKind kind, cplx value, double mu, int n, const Expr* a, const Expr* b) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->value = value;
  node->mu = mu;
  node->n = n;
  if (a) node->a = a->node_;
  if (b) node->b = b->node_;
  return Expr(std::move(node));
}

Expr::Expr() {
  static const std::shared_ptr<const Node> zero = std::make_shared<Node>();
  node_ = zero;
}

Expr Expr::z() { return make_node(NodeKind::Z, 0.0, 0.0, 0, nullptr, nullptr); }

Expr Expr::constant(cplx c) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
    fail(ErrorKind::Argument, "non-finite constant in expression");
  }
  return make_node(NodeKind::Const, c, 0.0, 0, nullptr, nullptr);
}

Expr Expr::pow1mz(double mu) {
  if (!std::isfinite(mu)) fail(ErrorKind::Argument, "pow1mz exponent must be finite");
  if (mu == 0.0) return constant(1.0);
  return make_node(NodeKind::Pow1mz, 0.0, mu, 0, nullptr, nullptr);
}

NodeKind Expr::kind() const { return node_->kind; }
cplx Expr::value() const { return node_->value; }
double Expr::mu() const { return node_->mu; }
int Expr::n() const { return node_->n; }
Expr Expr::a() const { return node_->a ? Expr(node_->a) : Expr(); }
Expr Expr::b() const { return node_->b ? Expr(node_->b) : Expr(); }

Expr add(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(a.value() + b.value());
  if (a.is_const(0.0)) return b;
  if (b.is_const(0.0)) return a;
  return make_node(NodeKind::Add, 0.0, 0.0, 0, &a, &b);
}

Expr neg(const Expr& a) {
  if (a.is_const()) return Expr::constant(-a.value());
  if (a.kind() == NodeKind::Neg) return a.a();
  return make_node(NodeKind::Neg, 0.0, 0.0, 0, &a, nullptr);
}

Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }

Expr mul(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(a.value() * b.value());
  if (a.is_const(0.0) || b.is_const(0.0)) return Expr::constant(0.0);
  if (a.is_const(1.0)) return b;
  if (b.is_const(1.0)) return a;
  if (a.is_const(-1.0)) return neg(b);
  if (b.is_const(-1.0)) return neg(a);
  if (a.kind() == NodeKind::Pow1mz && b.kind() == NodeKind::Pow1mz) {
    return Expr::pow1mz(a.mu() + b.mu());
  }
  // Keep constants on the left so printing and folding stay canonical.
  if (b.is_const()) return make_node(NodeKind::Mul, 0.0, 0.0, 0, &b, &a);
  return make_node(NodeKind::Mul, 0.0, 0.0, 0, &a, &b);
}

Expr exp(const Expr& a) {
  if (a.is_const() && a.value().real() <= kExpInputLimit) return Expr::constant(std::exp(a.value()));
  return make_node(NodeKind::Exp, 0.0, 0.0, 0, &a, nullptr);
}

Expr ipow(const Expr& a, int n) {
  if (n < 0) fail(ErrorKind::Argument, "negative integer powers are not analytic in general");
  if (n == 0) return Expr::constant(1.0);
  if (n == 1) return a;
  if (a.is_const()) return Expr::constant(std::pow(a.value(), n));
  if (a.kind() == NodeKind::Pow1mz) return Expr::pow1mz(a.mu() * n);
  return make_node(NodeKind::IntPow, 0.0, 0.0, n, &a, nullptr);
}

std::size_t size(const Expr& e) {
  constexpr std::size_t cap = std::numeric_limits<std::size_t>::max() / 4;
  std::unordered_map<const Node*, std::size_t> memo;
  std::function<std::size_t(const Expr&)> rec = [&](const Expr& x) -> std::size_t {
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    std::size_t s = 1;
    if (x.id()->a) s = std::min(cap, s + rec(x.a()));
    if (x.id()->b) s = std::min(cap, s + rec(x.b()));
    memo[x.id()] = s;
    return s;
  };
  return rec(e);
}

int exp_depth(const Expr& e) {
  std::unordered_map<const Node*, int> memo;
  std::function<int(const Expr&)> rec = [&](const Expr& x) -> int {
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    int d = 0;
    if (x.id()->a) d = rec(x.a());
    if (x.id()->b) d = std::max(d, rec(x.b()));
    if (x.kind() == NodeKind::Exp) ++d;
    memo[x.id()] = d;
    return d;
  };
  return rec(e);
}

Expr diff(const Expr& e, std::size_t budget) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> rec = [&](const Expr& x) -> Expr {
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    Expr d;
    switch (x.kind()) {
      case NodeKind::Z: d = Expr::constant(1.0); break;
      case NodeKind::Const: d = Expr::constant(0.0); break;
      case NodeKind::Add: d = add(rec(x.a()), rec(x.b())); break;
      case NodeKind::Neg: d = neg(rec(x.a())); break;
      case NodeKind::Mul: d = add(mul(rec(x.a()), x.b()), mul(x.a(), rec(x.b()))); break;
      case NodeKind::Pow1mz: d = mul(Expr::constant(x.mu()), Expr::pow1mz(x.mu() + 1.0)); break;
      case NodeKind::Exp: d = mul(rec(x.a()), x); break;
      case NodeKind::IntPow:
        d = mul(Expr::constant(static_cast<double>(x.n())), mul(ipow(x.a(), x.n() - 1), rec(x.a())));
        break;
    }
    memo[x.id()] = d;
    return d;
  };
  Expr out = rec(e);
  if (size(out) > budget) {
    fail(ErrorKind::Size, "derivative has " + std::to_string(size(out)) +
                              " nodes, over the budget of " + std::to_string(budget));
  }
  return out;
}

Expr build_tower(const TowerSpec& t) {
  if (t.level < 1 || t.level > 3) fail(ErrorKind::Argument, "tower level must be 1, 2 or 3");
  if (!(t.c > 0) || !(t.mu > 0)) fail(ErrorKind::Argument, "tower needs c > 0 and mu > 0");
  Expr e = mul(Expr::constant(t.c), Expr::pow1mz(t.mu));
  for (int i = 0; i < t.level; ++i) e = make_node(NodeKind::Exp, 0.0, 0.0, 0, &e, nullptr);
  return e;
}

std::vector<Expr> log_derivative_ratios(const Expr& f, int k, std::size_t budget) {
  if (f.kind() != NodeKind::Exp) fail(ErrorKind::Argument, "log-derivative ratios need f = exp(g)");
  if (k < 0) fail(ErrorKind::Argument, "negative derivative order");
  const Expr gp = diff(f.a(), budget);
  std::vector<Expr> d{Expr::constant(1.0)};
  for (int j = 0; j < k; ++j) {
    Expr next = add(diff(d.back(), budget), mul(gp, d.back()));
    if (size(next) > budget) {
      fail(ErrorKind::Size, "D_" + std::to_string(j + 1) + " exceeds the node budget");
    }
    d.push_back(next);
  }
  return d;
}

// ---------------------------------------------------------------- points

DiscPoint DiscPoint::polar(double r, double theta) {
  if (!(r >= 0 && r < 1)) fail(ErrorKind::Domain, "point outside the unit disc: r = " + std::to_string(r));
  return {r, theta, 1.0 - r};
}

DiscPoint DiscPoint::polar_1mr(double one_minus_r, double theta) {
  if (!(one_minus_r > 0 && one_minus_r <= 1)) {
    fail(ErrorKind::Domain, "point outside the unit disc: 1 - r = " + std::to_string(one_minus_r));
  }
  return {1.0 - one_minus_r, theta, one_minus_r};
}

DiscPoint DiscPoint::from_complex(cplx z) { return polar(std::abs(z), std::arg(z)); }

cplx DiscPoint::to_complex() const { return std::polar(r, theta); }

// ---------------------------------------------------------------- evaluation

Evaluator::Evaluator(const Expr& e) {
  keep_.push_back(e);
  std::unordered_map<const Node*, int> index;
  std::function<int(const Expr&)> rec = [&](const Expr& x) -> int {
    if (auto it = index.find(x.id()); it != index.end()) return it->second;
    Instr in{x.kind(), x.value(), x.mu(), x.n(), -1, -1, x};
    if (x.id()->a) in.a = rec(x.a());
    if (x.id()->b) in.b = rec(x.b());
    code_.push_back(in);
    const int i = static_cast<int>(code_.size()) - 1;
    index[x.id()] = i;
    return i;
  };
  root_ = rec(e);
  cache_.resize(code_.size());
  have_.assign(code_.size(), 0);
}

void Evaluator::reset(const DiscPoint& p) {
  point_ = p;
  std::fill(have_.begin(), have_.end(), 0);
}

const LogComplex& Evaluator::get(int i) {
  if (have_[i]) return cache_[i];
  const Instr& in = code_[i];
  LogComplex v;
  switch (in.kind) {
    case NodeKind::Z:
      v = point_.r == 0 ? LogComplex::zero() : LogComplex::polar_log(std::log(point_.r), point_.theta);
      break;
    case NodeKind::Const: v = LogComplex::from_complex(in.value); break;
    case NodeKind::Add: v = lc_add(get(in.a), get(in.b)); break;
    case NodeKind::Neg: v = lc_neg(get(in.a)); break;
    case NodeKind::Mul: v = lc_mul(get(in.a), get(in.b)); break;
    case NodeKind::IntPow: v = lc_pow(get(in.a), in.n); break;
    case NodeKind::Pow1mz: {
      const double s = std::sin(0.5 * point_.theta);
      const double re = point_.one_minus_r + 2.0 * point_.r * s * s;
      const double im = -point_.r * std::sin(point_.theta);
      v = LogComplex::polar_log(-in.mu * std::log(std::hypot(re, im)), -in.mu * std::atan2(im, re));
      break;
    }
    case NodeKind::Exp: {
      const LogComplex& arg = get(in.a);
      try {
        v = lc_exp(arg);
      } catch (const TowerOverflow& e) {
        std::string text = to_string(code_[i].expr);
        if (text.size() > 80) text = text.substr(0, 77) + "...";
        text += " at r = " + std::to_string(point_.r) + ", theta = " + std::to_string(point_.theta);
        throw TowerOverflow(e.logmag(), text);
      }
      break;
    }
  }
  cache_[i] = v;
  have_[i] = 1;
  return cache_[i];
}

LogModulus Evaluator::modulus(int i) {
  const Instr& in = code_[i];
  switch (in.kind) {
    case NodeKind::Exp: return LogModulus::from_real_lc(get(in.a).real_part());
    case NodeKind::Mul: return modulus(in.a) + modulus(in.b);
    case NodeKind::Neg: return modulus(in.a);
    case NodeKind::IntPow: return scale(modulus(in.a), in.n);
    default: {
      const LogComplex& v = get(i);
      if (v.is_zero()) return LogModulus::of_zero();
      return LogModulus::from_log_abs(v.logmag);
    }
  }
}

LogComplex Evaluator::value(const DiscPoint& p) {
  reset(p);
  return get(root_);
}

LogModulus Evaluator::log_abs(const DiscPoint& p) {
  reset(p);
  return modulus(root_);
}

LogComplex eval_log(const Expr& e, cplx z) { return eval_log(e, DiscPoint::from_complex(z)); }

LogComplex eval_log(const Expr& e, const DiscPoint& p) { return Evaluator(e).value(p); }

LogModulus log_abs(const Expr& e, const DiscPoint& p) { return Evaluator(e).log_abs(p); }

// ---------------------------------------------------------------- taylor

namespace {

using Coeffs = std::vector<LogComplex>;

Coeffs taylor_rec(const Expr& x, std::size_t n, std::unordered_map<const Node*, Coeffs>& memo) {
  if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
  Coeffs out(n);
  switch (x.kind()) {
    case NodeKind::Z:
      if (n > 1) out[1] = LogComplex::one();
      break;
    case NodeKind::Const:
      if (n > 0) out[0] = LogComplex::from_complex(x.value());
      break;
    case NodeKind::Add: {
      const Coeffs a = taylor_rec(x.a(), n, memo);
      const Coeffs b = taylor_rec(x.b(), n, memo);
      for (std::size_t i = 0; i < n; ++i) out[i] = lc_add(a[i], b[i]);
      break;
    }
    case NodeKind::Neg: {
      const Coeffs a = taylor_rec(x.a(), n, memo);
      for (std::size_t i = 0; i < n; ++i) out[i] = lc_neg(a[i]);
      break;
    }
    case NodeKind::Mul:
      out = cauchy(LogVec(taylor_rec(x.a(), n, memo)), LogVec(taylor_rec(x.b(), n, memo)), n);
      break;
    case NodeKind::Pow1mz: {
      // (1-z)^(-mu) = sum (mu)_k / k! z^k
      double lm = 0.0, ph = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
          const double f = x.mu() + static_cast<double>(i) - 1.0;
          if (f == 0.0) break;
          lm += std::log(std::abs(f)) - std::log(static_cast<double>(i));
          if (f < 0) ph += kPi;
        }
        out[i] = LogComplex::polar_log(lm, ph);
      }
      break;
    }
    case NodeKind::Exp: {
      // n b_n = sum_{m=1}^{n} m a_m b_{n-m}
      const Coeffs a = taylor_rec(x.a(), n, memo);
      if (n == 0) break;
      Coeffs da(n);
      for (std::size_t m = 1; m < n; ++m) {
        if (!a[m].is_zero()) {
          da[m] = LogComplex::polar_log(a[m].logmag + std::log(static_cast<double>(m)), a[m].phase);
        }
      }
      const LogVec dv(da);
      LogVec bv;
      out[0] = lc_exp(a[0]);
      bv.push(out[0]);
      for (std::size_t k = 1; k < n; ++k) {
        LogComplex s = conv_at(dv, bv, k, 0, k - 1);
        if (!s.is_zero()) s.logmag -= std::log(static_cast<double>(k));
        out[k] = s;
        bv.push(s);
      }
      break;
    }
    case NodeKind::IntPow: {
      LogVec base(taylor_rec(x.a(), n, memo));
      Coeffs acc(n);
      if (n > 0) acc[0] = LogComplex::one();
      for (int p = x.n();;) {
        if (p & 1) acc = cauchy(LogVec(acc), base, n);
        p >>= 1;
        if (!p) break;
        base = LogVec(cauchy(base, base, n));
      }
      out = std::move(acc);
      break;
    }
  }
  memo[x.id()] = out;
  return out;
}

}  // namespace

LogSeries taylor(const Expr& e, std::size_t n) {
  if (n > kMaxTaylorTerms) {
    fail(ErrorKind::Size, "taylor: " + std::to_string(n) + " terms requested, cap is " +
                              std::to_string(kMaxTaylorTerms));
  }
  if (exp_depth(e) > 2) {
    fail(ErrorKind::Precondition, "taylor extraction is limited to exp depth <= 2 (level-3 towers excluded)");
  }
  std::unordered_map<const Node*, Coeffs> memo;
  LogSeries s;
  s.coeffs = taylor_rec(e, n, memo);
  s.r_reliable = reliable_radius(s.coeffs);
  return s;
}

// ---------------------------------------------------------------- text

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print(const Expr& x) {
  switch (x.kind()) {
    case NodeKind::Z: return "z";
    case NodeKind::Const: {
      const cplx v = x.value();
      if (v.imag() != 0.0) return "const(" + num(v.real()) + "," + num(v.imag()) + ")";
      if (v.real() < 0 || std::signbit(v.real())) return "(" + num(v.real()) + ")";
      return num(v.real());
    }
    case NodeKind::Add: return "(" + print(x.a()) + " + " + print(x.b()) + ")";
    case NodeKind::Neg: return "-(" + print(x.a()) + ")";
    case NodeKind::Mul: return print(x.a()) + "*" + print(x.b());
    case NodeKind::Pow1mz: return "pow1mz(" + num(x.mu()) + ")";
    case NodeKind::Exp: return "exp(" + print(x.a()) + ")";
    case NodeKind::IntPow: return "(" + print(x.a()) + ")^" + std::to_string(x.n());
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr run() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::Parse, "expression '" + std::string(s_) + "' at offset " +
                               std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) error(std::string("expected '") + c + "'");
  }

  Expr sum() {
    Expr e = product();
    while (true) {
      if (eat('+')) {
        e = add(e, product());
      } else if (eat('-')) {
        e = sub(e, product());
      } else {
        return e;
      }
    }
  }
  Expr product() {
    Expr e = unary();
    while (eat('*')) e = mul(e, unary());
    return e;
  }
  Expr unary() {
    if (eat('-')) return neg(unary());
    if (eat('+')) return unary();
    return power();
  }
  Expr power() {
    Expr e = primary();
    if (eat('^')) {
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) error("exponent must be a non-negative integer");
      const long n = std::strtol(std::string(s_.substr(start, pos_ - start)).c_str(), nullptr, 10);
      if (n > 1000000) error("exponent too large");
      e = ipow(e, static_cast<int>(n));
    }
    return e;
  }
  double real_arg() {
    const Expr e = sum();
    if (!e.is_const() || e.value().imag() != 0.0) error("argument must be a real constant");
    return e.value().real();
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) error("bad number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      return Expr::constant(v);
    }
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      if (name == "z") return Expr::z();
      if (name == "i") return Expr::constant(cplx(0.0, 1.0));
      expect('(');
      Expr out;
      if (name == "exp") {
        out = exp(sum());
      } else if (name == "pow1mz") {
        out = Expr::pow1mz(real_arg());
      } else if (name == "const") {
        const double re = real_arg();
        double im = 0.0;
        if (eat(',')) im = real_arg();
        out = Expr::constant(cplx(re, im));
      } else if (name == "tower") {
        const double level = real_arg();
        expect(',');
        const double cc = real_arg();
        expect(',');
        const double mu = real_arg();
        if (level != std::floor(level)) error("tower level must be an integer");
        try {
          out = build_tower({static_cast<int>(level), cc, mu});
        } catch (const Error& e) {
          error(e.what());
        }
      } else {
        error("unknown function '" + name + "'");
      }
      expect(')');
      return out;
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Expr& e) { return print(e); }

Expr parse_expr(std::string_view text) { return Parser(text).run(); }

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> v;
    auto plain = [&](const char* name) { v.push_back({name, parse_expr(name), 0}); };
    auto tower = [&](int level, double c, double mu) {
      char name[64];
      std::snprintf(name, sizeof name, "tower(%d,%g,%g)", level, c, mu);
      v.push_back({name, build_tower({level, c, mu}), level});
    };
    plain("const(3)");
    plain("exp(z)");
    plain("pow1mz(1)");
    plain("pow1mz(2)");
    tower(1, 1, 1);
    tower(2, 1, 1);
    tower(2, 2, 1);
    tower(2, 1, 0.5);
    tower(2, 0.5, 1);
    tower(3, 1, 1);
    tower(3, 1, 0.5);
    return v;
  }();
  return entries;
}

}  // namespace abg
