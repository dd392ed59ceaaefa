#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace abg {

enum class ScaleKind { IteratedLog, Identity, PowerConcave };

/// A growth-scale function from the catalog: log^[p] x, x, or x^s (0 < s <= 1),
/// held constant at cap_value for x <= cap_x0. Immutable.
class ScaleFn {
 public:
  /// cap_x0 defaults to exp^[p-1](e), where log^[p] equals 1.
  static ScaleFn iterated_log(int p);
  static ScaleFn iterated_log(int p, double cap_x0);
  static ScaleFn identity();
  static ScaleFn power(double s);

  double operator()(double x) const;
  /// Smallest x with eval(x) = y; throws a domain error below the cap.
  double inverse(double y) const;
  /// log(inverse(y)), finite where inverse(y) itself would overflow.
  double log_inverse(double y) const;

  ScaleKind kind() const { return kind_; }
  int p() const { return p_; }
  double s() const { return s_; }
  double cap_x0() const { return cap_x0_; }
  double cap_value() const { return cap_value_; }
  /// Concave and non-decreasing above the cap (implies L3 there).
  bool concave_above_cap() const { return true; }
  std::string name() const;

 private:
  ScaleFn(ScaleKind kind, int p, double s, double cap_x0);
  double formula(double x) const;

  ScaleKind kind_;
  int p_ = 1;
  double s_ = 1.0;
  double cap_x0_ = 0.0;
  double cap_value_ = 0.0;
};

/// Parses "iterlog:p", "id" or "pow:s".
ScaleFn parse_scale(std::string_view text);

struct ScaleTriple {
  ScaleFn alpha;
  ScaleFn beta;
  ScaleFn gamma;

  /// beta(log gamma(1/(1-r))) given 1-r directly.
  double denominator(double one_minus_r) const;
  std::string name() const;
};

/// Parses "alpha,beta,gamma", e.g. "iterlog:1,id,id".
ScaleTriple parse_triple(std::string_view text);

/// log^[p] x, returning -inf as soon as an intermediate value is non-positive.
double iterated_log(double x, int p);
/// exp^[p] x (may overflow to +inf).
double iterated_exp(double x, int p);

enum class ScaleClass { L1, L2, L3 };

/// Sampling plan for the class and condition checks.
struct SampleSpec {
  std::vector<double> pair_grid;   // a, b values for L1/L3
  std::vector<double> x_grid;      // increasing x values for L2 and "o(.)" checks
  std::vector<double> offsets{1.0, 5.0};
  double o_threshold = 0.05;       // ratio at the last grid point must be below
  int monotone_tail = 5;           // and non-increasing over this many points
  double l1_constant_limit = 10.0;

  static SampleSpec defaults();
};

struct ClassReport {
  bool pass = true;
  std::string check;      // which property was tested
  double worst = 0.0;     // worst excess (L1/L3) or last ratio (L2, o-checks)
  double best_constant = 0.0;  // L1: smallest c that works on the grid
  double witness_a = 0.0, witness_b = 0.0;  // first violation, if any
  std::string note;
  std::vector<ClassReport> parts;  // sub-checks, for aggregated reports
};

ClassReport check_class(const ScaleFn& fn, ScaleClass cls, const SampleSpec& spec);
ClassReport check_class(const std::function<double(double)>& fn, ScaleClass cls,
                        const SampleSpec& spec);

/// Condition (ii): (a) alpha(log^[p] x)/beta(log gamma(x)) -> 0 for p = 2..p_max,
/// (b) alpha(log x)/alpha(x) -> 0, (c) alpha^-1(kx)/alpha^-1(x) -> 0.
ClassReport check_triple_conditions(const ScaleTriple& t, int p_max, const SampleSpec& spec);

/// Class checks alpha in L1, beta in L2, gamma in L3 plus condition (ii).
ClassReport check_triple(const ScaleTriple& t, int p_max = 3,
                         const SampleSpec& spec = SampleSpec::defaults());

std::string describe(const ClassReport& report, int indent = 0);

}  // namespace abg
