#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "abg/funcs.hpp"
#include "abg/growth.hpp"
#include "abg/ode.hpp"
#include "abg/scale.hpp"

namespace abg {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Disjoint subintervals of [0,1).
struct ExceptionalSet {
  std::vector<Interval> intervals;

  /// Appends [lo, hi), merging with the last interval when they touch.
  void add(double lo, double hi);
  bool empty() const { return intervals.empty(); }
};

/// sum log((1 - lo)/(1 - hi)), the integral of dr/(1-r). Overlaps are errors.
double log_measure(const ExceptionalSet& s);

struct BoundReport {
  std::string label;
  std::vector<double> r;
  std::vector<double> lhs_log;
  std::vector<double> rhs_log;
  std::vector<double> margin;  // rhs_log - lhs_log
  std::vector<bool> violate;
  ExceptionalSet violations;
  double measure = 0.0;        // log-measure of the violation set
  double log_K = 0.0;          // fitted constant, where one is used
  double rho_used = 0.0;
};

/// Turns per-radius violations on a grid into cells [r_i, r_{i+1}).
ExceptionalSet cells_from_mask(const RadialGrid& g, const std::vector<bool>& mask);

void write_bound_csv(std::ostream& os, const BoundReport& rep);

struct HeittokangasBound {
  LogModulus log_bound;  // log of C exp(n_c I)
  double log_C = 0.0;
  double log_I = 0.0;
  int n_c = 0;
};

struct HeittokangasOptions {
  double eps = 1.0;
  std::optional<double> log_C_override;
  int initial_panels = 8;
  double rel = 1e-8;
};

/// Bound on log|f(r e^{i theta})| for solutions of p from the coefficient
/// integral over [nu, r]. f^(j)(nu e^{i theta}) comes from the initial
/// conditions (nu = 0), the closed-form solution, or the given series.
HeittokangasBound heittokangas_bound(const OdeProblem& p, double r, double theta, double nu = 0.0,
                                     const HeittokangasOptions& opts = {},
                                     const LogSeries* series = nullptr);

/// Order of the bound: max over n_theta directions of the bound, used as a
/// surrogate log M in the (alpha(log),beta,gamma) M-order.
OrderEstimate order_of_bound(const OdeProblem& p, const ScaleTriple& t, const RadialGrid& g,
                             int n_theta = 16, const GrowthOptions& opts = {});

/// |f^(k)/f^(j)| at the maximum-modulus direction against
/// [(1-r)^-(2+eps) max{log 1/(1-r), T(1 - d(1-r), f)}]^(k-j).
BoundReport log_derivative_check(const Expr& f, int k, int j, const RadialGrid& g, double d,
                                 double eps, const GrowthOptions& opts = {});

/// m(r, f^(k)/f) against K exp(alpha^-1((rho + eps) beta(log gamma(1/(1-r))))),
/// rho the measured (alpha(log),beta,gamma) T-order, K fitted on the first
/// half of the grid.
BoundReport proximity_bound_check(const Expr& f, int k, const ScaleTriple& t, const RadialGrid& g,
                                  double eps, const GrowthOptions& opts = {});

struct BorelShiftResult {
  bool pass = true;
  double first_violation_r = kNaN;
  int checked = 0;
  int skipped = 0;  // radii whose shifted point lies beyond the samples
  bool precondition_ok = true;  // g <= h at every sample outside `bad`
};

/// g(r) <= h(1 - d(1-r)) at each sampled r, h interpolated linearly.
BorelShiftResult borel_shift_check(const std::vector<double>& r, const std::vector<double>& g_vals,
                                   const std::vector<double>& h_vals, const ExceptionalSet& bad,
                                   double d);

struct TypedThreshold {
  double omega = 0.0;
  double rho = 0.0;
};

struct LowerSetReport {
  std::vector<double> r;
  std::vector<bool> holds;
  std::vector<double> cumulative;  // log-measure of the holding cells up to r_i
  ExceptionalSet set;
  double measure = 0.0;
  double measured = 0.0;  // order (untyped) or type (typed) of f
  bool infinite_surrogate = false;
};

/// Grid cells where alpha(log^[2] M) > mu beta(...) (or, typed, where
/// exp(alpha(log^[2] M)) > omega exp(beta(...))^rho), with the cumulative
/// log-measure and the "infinite measure" surrogate: final measure > 3 and
/// non-decreasing increments over the last five radii.
LowerSetReport lower_set_measure(const Expr& f, const ScaleTriple& t, double mu,
                                 const RadialGrid& g,
                                 std::optional<TypedThreshold> typed = std::nullopt,
                                 const GrowthOptions& opts = {});

}  // namespace abg
