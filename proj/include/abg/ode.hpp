#pragma once

#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "abg/funcs.hpp"
#include "abg/series.hpp"

namespace abg {

/// f^(k) + A_{k-1} f^(k-1) + ... + A_0 f = 0 on the unit disc.
struct OdeProblem {
  int k = 2;
  std::vector<Expr> coeffs;           // A_0 .. A_{k-1}
  std::vector<LogComplex> ic;         // f(0) .. f^(k-1)(0); empty means e_0
  std::optional<Expr> solution;       // closed form, when known

  void validate() const;
  std::vector<LogComplex> initial_conditions() const;
  /// Indices j with A_j not identically zero.
  std::vector<int> nonzero_coeffs() const;
};

inline constexpr std::size_t kDefaultSeriesTerms = 4096;
inline constexpr std::size_t kMaxSeriesTerms = std::size_t{1} << 16;

LogSeries solve_series(const OdeProblem& p, std::size_t n = kDefaultSeriesTerms);

/// max over a theta grid of |f^(k) + sum A_j f^(j)| / (|f^(k)| + sum |A_j f^(j)|).
double residual(const OdeProblem& p, const LogSeries& s, double r_check, int n_theta = 64,
                Guard guard = Guard::Enforce);

/// Same relative residual for the closed-form solution, through D_j = f^(j)/f.
double closed_form_residual(const OdeProblem& p, const DiscPoint& z);

/// Equation with the given Exp-rooted f as an exact solution: A_1..A_{k-1}
/// from `higher`, A_0 = -(D_k + sum_{j>=1} A_j D_j).
OdeProblem manufacture(const Expr& f, const std::vector<Expr>& higher, int k);

/// Problem files: `key = value` lines with k, A0..A{k-1}, ic (comma list of
/// constant expressions), optional solution, or manufacture = f together
/// with the higher coefficients. '#' starts a comment.
OdeProblem parse_problem(std::string_view text);
OdeProblem load_problem(const std::string& path);

void write_series_csv(std::ostream& os, const LogSeries& s);

}  // namespace abg
