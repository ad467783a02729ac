#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "types.hpp"

namespace ncvar {

struct NelderMeadOptions {
  int max_iters = 2000;
  double initial_step = 0.5;
  double ftol = 1e-12;  // stop when the simplex values spread less than this
  double xtol = 1e-10;  // ... and the simplex has collapsed below this size
};

struct NelderMeadResult {
  std::vector<double> x;
  double f;
  int iterations;
  int evaluations;
};

// Minimizes f with the adaptive-coefficient Nelder-Mead simplex (coefficients
// scaled with the dimension, which keeps the method usable above ~10
// parameters).
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  const std::size_t n = x0.size();
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  if (n == 0) return {x0, eval(x0), 0, evals};
  const double dn = static_cast<double>(n);
  const double alpha = 1.0, beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 1.0 / (2.0 * dn), delta = 1.0 - 1.0 / dn;

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;
  for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      p2[i] = pts[order[i]];
      v2[i] = val[order[i]];
    }
    pts.swap(p2);
    val.swap(v2);

    double size = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(pts[i][k] - pts[0][k]));
    }
    if (std::abs(val[n] - val[0]) <= opt.ftol && size <= opt.xtol) break;
    if (size <= 1e-14) break;

    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) c[k] += pts[i][k] / dn;
    }
    auto along = [&](double t) {
      std::vector<double> y(n);
      for (std::size_t k = 0; k < n; ++k) y[k] = c[k] + t * (pts[n][k] - c[k]);
      return y;
    };
    std::vector<double> xr = along(-alpha);
    double fr = eval(xr);
    if (fr < val[0]) {
      std::vector<double> xe = along(-alpha * beta);
      double fe = eval(xe);
      if (fe < fr) {
        pts[n] = xe;
        val[n] = fe;
      } else {
        pts[n] = xr;
        val[n] = fr;
      }
      continue;
    }
    if (fr < val[n - 1]) {
      pts[n] = xr;
      val[n] = fr;
      continue;
    }
    bool outside = fr < val[n];
    std::vector<double> xc = along(outside ? -alpha * gamma : gamma);
    double fc = eval(xc);
    if (fc < (outside ? fr : val[n])) {
      pts[n] = xc;
      val[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[0][k] + delta * (pts[i][k] - pts[0][k]);
      val[i] = eval(pts[i]);
    }
  }
  std::size_t best = std::min_element(val.begin(), val.end()) - val.begin();
  return {pts[best], val[best], it, evals};
}

// Repeated Nelder-Mead from the same point; a fresh simplex around the
// incumbent helps escape premature collapse.
inline NelderMeadResult nelder_mead_restarted(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x0, const NelderMeadOptions& opt,
                                              int rounds = 3) {
  NelderMeadResult best = nelder_mead(f, std::move(x0), opt);
  NelderMeadOptions o = opt;
  for (int r = 1; r < rounds; ++r) {
    o.initial_step *= 0.3;
    NelderMeadResult next = nelder_mead(f, best.x, o);
    next.evaluations += best.evaluations;
    next.iterations += best.iterations;
    bool improved = next.f < best.f - 1e-15;
    if (next.f <= best.f) best = next;
    if (!improved) break;
  }
  return best;
}

}  // namespace ncvar
