#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "abg/lognum.hpp"
#include "abg/series.hpp"

namespace abg {

enum class NodeKind { Z, Const, Add, Neg, Mul, Pow1mz, Exp, IntPow };

struct Node;

/// Immutable expression for a function analytic on the unit disc. Cheap to
/// copy (shared DAG). Factories fold constants and drop neutral elements.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr z();
  static Expr constant(std::complex<double> c);
  /// (1 - z)^(-mu), principal branch.
  static Expr pow1mz(double mu);

  NodeKind kind() const;
  std::complex<double> value() const;  // Const
  double mu() const;                   // Pow1mz
  int n() const;                       // IntPow
  Expr a() const;                      // first child
  Expr b() const;                      // second child (Add, Mul)

  bool is_const() const { return kind() == NodeKind::Const; }
  bool is_const(std::complex<double> c) const { return is_const() && value() == c; }
  const Node* id() const { return node_.get(); }

 private:
  friend Expr make_node(NodeKind, std::complex<double>, double, int, const Expr*,
                        const Expr*);
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  NodeKind kind = NodeKind::Const;
  std::complex<double> value{0.0, 0.0};
  double mu = 0.0;
  int n = 0;
  std::shared_ptr<const Node> a, b;
};

Expr add(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr exp(const Expr& a);
Expr ipow(const Expr& a, int n);

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }

inline constexpr std::size_t kDefaultNodeBudget = 10000;
inline constexpr std::size_t kMaxTaylorTerms = std::size_t{1} << 16;

/// Node count with shared subtrees counted once per use (saturating).
std::size_t size(const Expr& e);
/// Maximum nesting depth of Exp nodes.
int exp_depth(const Expr& e);

Expr diff(const Expr& e, std::size_t budget = kDefaultNodeBudget);

struct TowerSpec {
  int level = 1;
  double c = 1.0;
  double mu = 1.0;
};

/// exp^[level](c (1-z)^(-mu)), level in 1..3.
Expr build_tower(const TowerSpec& t);

/// D_j = f^(j)/f for j = 0..k, f = exp(g).
std::vector<Expr> log_derivative_ratios(const Expr& f, int k,
                                        std::size_t budget = kDefaultNodeBudget);

/// A point of the disc kept in polar form so 1 - z is accurate near the boundary.
struct DiscPoint {
  double r = 0.0;
  double theta = 0.0;
  double one_minus_r = 1.0;

  static DiscPoint polar(double r, double theta);
  static DiscPoint polar_1mr(double one_minus_r, double theta);
  static DiscPoint from_complex(std::complex<double> z);
  std::complex<double> to_complex() const;
};

/// Compiled evaluator with per-point memoization. Not thread-safe; use one per
/// thread.
class Evaluator {
 public:
  explicit Evaluator(const Expr& e);

  LogComplex value(const DiscPoint& p);
  /// log|e(p)| as a LogModulus, reading log|exp(h)| off Re h so the outermost
  /// exponential of a tower is never formed.
  LogModulus log_abs(const DiscPoint& p);

 private:
  struct Instr {
    NodeKind kind;
    std::complex<double> value;
    double mu;
    int n;
    int a = -1, b = -1;
    Expr expr;
  };
  int compile(const Expr& e);
  void reset(const DiscPoint& p);
  const LogComplex& get(int i);
  LogModulus modulus(int i);

  std::vector<Instr> code_;
  std::vector<Expr> keep_;
  std::vector<LogComplex> cache_;
  std::vector<char> have_;
  DiscPoint point_;
  int root_ = -1;
};

LogComplex eval_log(const Expr& e, std::complex<double> z);
LogComplex eval_log(const Expr& e, const DiscPoint& p);
LogModulus log_abs(const Expr& e, const DiscPoint& p);

/// First n Taylor coefficients at 0. Forbidden for exp_depth > 2.
LogSeries taylor(const Expr& e, std::size_t n);

/// Text form; parse(to_string(e)) rebuilds an equivalent expression.
std::string to_string(const Expr& e);
/// Grammar: sums/differences of products of powers (^ with integer
/// exponent) of primaries: numbers, z, i, (expr), exp(expr), pow1mz(mu),
/// const(re[,im]), tower(level,c,mu).
Expr parse_expr(std::string_view text);

struct CatalogEntry {
  std::string name;
  Expr expr;
  int tower_level = 0;  // 0 for non-tower entries
};
const std::vector<CatalogEntry>& catalog();

}  // namespace abg
