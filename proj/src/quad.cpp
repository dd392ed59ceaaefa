#include "abg/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "abg/errors.hpp"

namespace abg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Panel {
  double a, b;
  double f[5];
  double val, err;
};

void estimate(Panel& p) {
  const double h = p.b - p.a;
  const double s1 = h / 6.0 * (p.f[0] + 4.0 * p.f[2] + p.f[4]);
  const double s2 = h / 12.0 * (p.f[0] + 4.0 * p.f[1] + 2.0 * p.f[2] + 4.0 * p.f[3] + p.f[4]);
  p.val = s2 + (s2 - s1) / 15.0;
  p.err = std::abs(s2 - s1);
}

struct Restart {
  double shift;
};

struct Run {
  const std::function<double(double)>& log_f;
  double shift;
  int evals = 0;

  double at(double x) {
    ++evals;
    const double l = log_f(x);
    if (std::isnan(l)) fail(ErrorKind::OutOfRegime, "integrand is NaN at " + std::to_string(x));
    if (l - shift > 30.0) throw Restart{l};
    return std::exp(l - shift);
  }
};

}  // namespace

LogQuadResult log_integrate(const std::function<double(double)>& log_f,
                            const std::vector<double>& breaks, const LogQuadOptions& opts) {
  if (breaks.size() < 2) fail(ErrorKind::Argument, "quadrature needs at least two breakpoints");
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) fail(ErrorKind::Argument, "quadrature breakpoints must increase");
  }
  const int sub = std::max(1, opts.initial_panels);

  // Initial shift: the largest sample on the coarse node set.
  double shift = kNegInf;
  int evals = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    for (int j = 0; j <= 4 * sub; ++j) {
      const double x = breaks[i] + (breaks[i + 1] - breaks[i]) * j / (4.0 * sub);
      shift = std::max(shift, log_f(x));
      ++evals;
    }
  }
  if (std::isnan(shift)) fail(ErrorKind::OutOfRegime, "integrand is NaN on the initial nodes");
  LogQuadResult res;
  if (shift == kNegInf) {
    res.log_value = kNegInf;
    res.evaluations = evals;
    res.converged = true;
    return res;
  }

  for (int attempt = 0; attempt < 8; ++attempt) {
    Run run{log_f, shift, evals};
    try {
      auto cmp = [](const Panel& x, const Panel& y) { return x.err < y.err; };
      std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> queue(cmp);
      double total = 0.0, total_err = 0.0;
      for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double w = (breaks[i + 1] - breaks[i]) / sub;
        for (int j = 0; j < sub; ++j) {
          Panel p;
          p.a = breaks[i] + w * j;
          p.b = j + 1 == sub ? breaks[i + 1] : breaks[i] + w * (j + 1);
          for (int q = 0; q < 5; ++q) p.f[q] = run.at(p.a + (p.b - p.a) * q / 4.0);
          estimate(p);
          total += p.val;
          total_err += p.err;
          queue.push(p);
        }
      }
      auto tolerance = [&](double value) {
        if (!(value > 0)) return 0.0;
        const double log_i = opts.offset + shift + std::log(value);
        return value * std::min(opts.cap, opts.rel * std::max(1.0, std::abs(log_i)));
      };
      int panels = static_cast<int>(queue.size());
      bool converged = false;
      while (true) {
        if (total_err <= tolerance(total)) {
          converged = true;
          break;
        }
        if (panels >= opts.max_panels) break;
        Panel p = queue.top();
        const double h = p.b - p.a;
        if (h <= 1e-15 * std::max(1.0, std::abs(p.a))) {
          // Cannot split further; accept the panel as it stands.
          queue.pop();
          total_err -= p.err;
          p.err = 0.0;
          queue.push(p);
          if (total_err <= 0) total_err = 0;
          continue;
        }
        queue.pop();
        Panel l, r;
        l.a = p.a;
        l.b = p.a + h / 2;
        r.a = l.b;
        r.b = p.b;
        l.f[0] = p.f[0];
        l.f[2] = p.f[1];
        l.f[4] = p.f[2];
        r.f[0] = p.f[2];
        r.f[2] = p.f[3];
        r.f[4] = p.f[4];
        l.f[1] = run.at(p.a + h / 8);
        l.f[3] = run.at(p.a + 3 * h / 8);
        r.f[1] = run.at(p.a + 5 * h / 8);
        r.f[3] = run.at(p.a + 7 * h / 8);
        estimate(l);
        estimate(r);
        total += l.val + r.val - p.val;
        total_err += l.err + r.err - p.err;
        queue.push(l);
        queue.push(r);
        ++panels;
      }
      // Re-sum to remove drift from the incremental updates.
      double sum = 0.0;
      while (!queue.empty()) {
        sum += queue.top().val;
        queue.pop();
      }
      res.log_value = sum > 0 ? shift + std::log(sum) : kNegInf;
      res.evaluations = run.evals;
      res.panels = panels;
      res.converged = converged;
      return res;
    } catch (const Restart& r) {
      shift = r.shift;
      evals = run.evals;
    }
  }
  fail(ErrorKind::OutOfRegime, "quadrature could not settle on a normalization");
}

}  // namespace abg
