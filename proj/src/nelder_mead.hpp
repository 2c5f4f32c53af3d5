#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace mdlamp::detail {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int evaluations = 0;
};

/// Downhill simplex on -f (i.e. maximizes f). Stops when the simplex
/// diameter falls below `tol` or the evaluation budget runs out.
inline NelderMeadResult nelder_mead_maximize(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, double initial_step, double tol,
    int max_evaluations) {
  const std::size_t n = x0.size();
  NelderMeadResult result;

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += initial_step;

  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    values[i] = -f(simplex[i]);
    ++result.evaluations;
  }

  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        double t = simplex[i][k] - simplex[0][k];
        s += t * t;
      }
      d = std::max(d, std::sqrt(s));
    }
    return d;
  };

  while (result.evaluations < max_evaluations) {
    // order: best first, worst last
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> sx(n + 1);
    std::vector<double> sv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      sx[i] = simplex[idx[i]];
      sv[i] = values[idx[i]];
    }
    simplex.swap(sx);
    values.swap(sv);

    if (diameter() < tol) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto point = [&](double coeff) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k)
        p[k] = centroid[k] + coeff * (simplex[n][k] - centroid[k]);
      return p;
    };

    std::vector<double> xr = point(-1.0);  // reflection
    double fr = -f(xr);
    ++result.evaluations;

    if (fr < values[0]) {
      std::vector<double> xe = point(-2.0);  // expansion
      double fe = -f(xe);
      ++result.evaluations;
      if (fe < fr) {
        simplex[n] = xe;
        values[n] = fe;
      } else {
        simplex[n] = xr;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = xr;
      values[n] = fr;
    } else {
      std::vector<double> xc = point(fr < values[n] ? -0.5 : 0.5);
      double fc = -f(xc);
      ++result.evaluations;
      if (fc < std::min(fr, values[n])) {
        simplex[n] = xc;
        values[n] = fc;
      } else {
        // shrink toward best
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t k = 0; k < n; ++k)
            simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
          values[i] = -f(simplex[i]);
          ++result.evaluations;
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (values[i] < values[best]) best = i;
  result.x = simplex[best];
  result.value = -values[best];
  return result;
}

}  // namespace mdlamp::detail
