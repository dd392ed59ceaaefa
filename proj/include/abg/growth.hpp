#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "abg/funcs.hpp"
#include "abg/lognum.hpp"
#include "abg/scale.hpp"

namespace abg {

/// r_i = 1 - (1 - r0) q^i, i = 0..n-1.
struct RadialGrid {
  double r0 = 0.5;
  double q = 0.72;
  int n = 24;

  void validate() const;
  double one_minus_r(int i) const;
  double r(int i) const { return 1.0 - one_minus_r(i); }
  RadialGrid first(int count) const { return {r0, q, count}; }
};

enum class OrderMode { M_order, T_order, M_logorder, T_logorder };

const char* to_string(OrderMode m);
/// Accepts M, T, Mlog, Tlog and the enum spellings.
OrderMode parse_mode(const std::string& s);
bool uses_T(OrderMode m);

struct GrowthOptions {
  int n_theta = 128;
  int tail_k = 8;
  int threads = 1;
  double quad_rel = 1e-8;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GrowthSample {
  double r = 0.0;
  double one_minus_r = 1.0;
  LogModulus log_M;  // log M(r,f)
  double theta_argmax = 0.0;
  double log_T = kNaN;  // log T(r,f); NaN when not computed, -inf when T = 0
  std::string error;   // non-empty when the radius could not be evaluated

  bool ok() const { return error.empty(); }
  double logM() const { return log_M.value(); }
  double loglogM() const { return log_M.loglog(); }
  double log3M() const;
  double T() const { return std::exp(log_T); }
};

/// log M by a uniform theta grid plus golden-section refinement.
GrowthSample max_modulus(Evaluator& ev, double one_minus_r, int n_theta = 128);
GrowthSample max_modulus(const Expr& f, double r, int n_theta = 128);

/// Fills log_T of an M-sample: log of (1/2pi) int log+|f| over the circle,
/// integrated in log space around the peak at theta_argmax.
void characteristic(Evaluator& ev, GrowthSample& s, double rel = 1e-8);
GrowthSample characteristic(const Expr& f, double r, int n_theta = 128);

/// One sample per grid radius. Radii that fail carry their error text.
std::vector<GrowthSample> sample_grid(const Expr& f, const RadialGrid& g, bool with_T,
                                      const GrowthOptions& opts = {});

/// alpha(numerator of the mode) for a sample.
double order_numerator(const GrowthSample& s, const ScaleTriple& t, OrderMode mode);

struct OrderEstimate {
  OrderMode mode = OrderMode::M_order;
  double value = 0.0;           // intercept-corrected tail maximum
  double raw_tail_max = 0.0;    // max numerator/denominator over the tail
  double slope = 0.0;           // least-squares slope over the tail
  double intercept = 0.0;
  std::vector<double> ratios;   // numerator/denominator, NaN in gaps
  std::vector<double> numerators;
  std::vector<double> denominators;
  std::vector<bool> valid;
  std::vector<GrowthSample> samples;
  int tail_used = 0;
};

/// Tail estimate from precomputed numerators/denominators (NaN = gap).
OrderEstimate estimate_from(const std::vector<double>& num, const std::vector<double>& den,
                            int tail_k);

OrderEstimate order_estimate(const Expr& f, const ScaleTriple& t, const RadialGrid& g,
                             OrderMode mode, const GrowthOptions& opts = {});
OrderEstimate order_from_samples(const std::vector<GrowthSample>& samples, const ScaleTriple& t,
                                 OrderMode mode, int tail_k = 8);

struct TypeEstimate {
  OrderMode mode = OrderMode::M_order;
  double value = 0.0;
  double rho_used = 0.0;
  std::vector<double> log_ratios;  // alpha(num) - rho * denominator
  std::vector<GrowthSample> samples;
};

TypeEstimate type_estimate(const Expr& f, const ScaleTriple& t, const RadialGrid& g,
                           OrderMode mode, double rho, const GrowthOptions& opts = {});
TypeEstimate type_from_samples(const std::vector<GrowthSample>& samples, const ScaleTriple& t,
                               OrderMode mode, double rho, int tail_k = 8);

struct Ineq12Row {
  double r = 0.0;
  double log_plus_M = kNaN;
  double T = kNaN;
  double T_shift = kNaN;  // T((1+r)/2)
  double margin_left = kNaN;   // log log+M - log T
  double margin_right = kNaN;  // log((1+3r)/(1-r) T(s)) - log log+M
  bool ok = false;
  std::string error;
};

struct Ineq12Report {
  std::vector<Ineq12Row> rows;
  bool pass = false;
  int evaluated = 0;
};

Ineq12Report verify_ineq_12(const Expr& f, const RadialGrid& g, const GrowthOptions& opts = {});

struct Prop11Report {
  OrderEstimate m_based;
  OrderEstimate t_based;
  double difference = 0.0;
};

Prop11Report proposition11_check(const Expr& f, const ScaleTriple& t, const RadialGrid& g,
                                 const GrowthOptions& opts = {});

/// Number of leading grid radii where f evaluates on the whole circle.
int evaluable_prefix(const Expr& f, const RadialGrid& g, int n_theta = 64);

/// Runs body(i) for i in [0, n) on up to `threads` workers; results must be
/// written to per-index storage.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

void write_growth_csv(std::ostream& os, const OrderEstimate& est);

}  // namespace abg
