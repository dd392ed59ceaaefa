#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace abg {

struct LogQuadResult {
  double log_value = 0.0;  // log of the integral; -inf when it vanishes
  int evaluations = 0;
  int panels = 0;
  bool converged = false;
};

struct LogQuadOptions {
  /// Stop when the estimated error of log I is below
  /// min(cap, rel * max(1, |offset + log I|)).
  double rel = 1e-8;
  double cap = std::numeric_limits<double>::infinity();
  double offset = 0.0;
  int initial_panels = 8;  // per breakpoint interval
  int max_panels = 40000;
};

/// Integral of exp(log_f) over [breaks.front(), breaks.back()] by globally
/// adaptive Simpson with Richardson correction, carried out on exp(log_f - shift)
/// so integrands far beyond double range are fine. Breakpoints should include
/// peaks and kinks.
LogQuadResult log_integrate(const std::function<double(double)>& log_f,
                            const std::vector<double>& breaks,
                            const LogQuadOptions& opts = {});

}  // namespace abg
