#ifndef EQUIPART_NELDER_MEAD_HPP
#define EQUIPART_NELDER_MEAD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace equipart {

struct NelderMeadOptions {
  double initial_step = 0.05;
  int max_evaluations = 5000;
  double target = -std::numeric_limits<double>::infinity();  // stop once f <= target
  double x_tolerance = 1e-12;  // restart when the simplex collapses below this
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

/// Simplex descent with dimension-adaptive coefficients (reflection 1,
/// expansion 1 + 2/m, contraction 0.75 - 1/(2m), shrink 1 - 1/m). When the
/// simplex collapses it is rebuilt around the best vertex with half the
/// previous step. Non-finite objective values are treated as +inf.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const NelderMeadOptions& opts = {}) {
  const std::size_t m = x0.size();
  const double dm = static_cast<double>(m);
  const double alpha = 1.0, gamma = 1.0 + 2.0 / dm, rho = 0.75 - 0.5 / dm, sigma = 1.0 - 1.0 / dm;

  NelderMeadResult best;
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    double v = f(x);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    ++evals;
    if (v < best.f) {
      best.f = v;
      best.x = x;
    }
    return v;
  };
  auto done = [&] { return evals >= opts.max_evaluations || best.f <= opts.target; };

  std::vector<std::vector<double>> simplex(m + 1, x0);
  std::vector<double> fx(m + 1);
  double step = opts.initial_step;

  auto rebuild = [&](const std::vector<double>& center) {
    simplex.assign(m + 1, center);
    for (std::size_t k = 0; k < m; ++k) simplex[k + 1][k] += step;
    for (std::size_t k = 0; k <= m && !done(); ++k) fx[k] = eval(simplex[k]);
  };
  rebuild(x0);

  std::vector<std::size_t> order(m + 1);
  std::vector<double> c(m), xr(m), xe(m), xc(m);
  while (!done()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    const std::size_t lo = order[0], hi = order[m], second = order[m - 1];

    double extent = 0.0;
    for (std::size_t k = 0; k <= m; ++k)
      for (std::size_t i = 0; i < m; ++i) extent = std::max(extent, std::abs(simplex[k][i] - simplex[lo][i]));
    if (extent < opts.x_tolerance || !std::isfinite(fx[lo])) {
      step *= 0.5;
      if (step < opts.x_tolerance) break;
      rebuild(best.x.empty() ? x0 : best.x);
      continue;
    }

    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t k = 0; k <= m; ++k)
      if (k != hi)
        for (std::size_t i = 0; i < m; ++i) c[i] += simplex[k][i] / dm;

    for (std::size_t i = 0; i < m; ++i) xr[i] = c[i] + alpha * (c[i] - simplex[hi][i]);
    const double fr = eval(xr);
    if (fr < fx[lo]) {
      for (std::size_t i = 0; i < m; ++i) xe[i] = c[i] + gamma * (xr[i] - c[i]);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[hi] = xe;
        fx[hi] = fe;
      } else {
        simplex[hi] = xr;
        fx[hi] = fr;
      }
      continue;
    }
    if (fr < fx[second]) {
      simplex[hi] = xr;
      fx[hi] = fr;
      continue;
    }
    const bool outside = fr < fx[hi];
    for (std::size_t i = 0; i < m; ++i)
      xc[i] = outside ? c[i] + rho * (xr[i] - c[i]) : c[i] - rho * (c[i] - simplex[hi][i]);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fx[hi])) {
      simplex[hi] = xc;
      fx[hi] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= m && !done(); ++k) {
      if (k == lo) continue;
      for (std::size_t i = 0; i < m; ++i) simplex[k][i] = simplex[lo][i] + sigma * (simplex[k][i] - simplex[lo][i]);
      fx[k] = eval(simplex[k]);
    }
  }
  if (best.x.empty()) best.x = x0;
  best.evaluations = evals;
  return best;
}

}  // namespace equipart

#endif  // EQUIPART_NELDER_MEAD_HPP
