#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "core/smallmat.hpp"

namespace hodo {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares y = intercept + slope * x with the usual stderr of
// the slope (residual variance over sum of squared x deviations).
inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      ss += r * r;
    }
    f.slope_stderr = std::sqrt(ss / (static_cast<double>(n) - 2.0) / sxx);
  }
  return f;
}

struct PolyFit {
  Vec coeffs;       // c_0..c_d, model y = sum c_k x^k
  Vec stderrs;      // per-coefficient standard errors
  double rms = 0.0; // RMS residual
};

// Degree-d polynomial least squares via normal equations with column scaling
// (columns are scaled to unit max before solving, adequate for the short,
// well-separated geometric windows used here).
inline PolyFit fit_poly(const std::vector<double>& x,
                        const std::vector<double>& y, int degree) {
  const std::size_t n = x.size();
  const int d = degree + 1;
  // Column scales: max |x^k|.
  Vec scale(d, 0.0);
  for (int k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      scale[k] = std::max(scale[k], std::fabs(std::pow(x[i], k)));
    if (scale[k] == 0.0) scale[k] = 1.0;
  }
  Mat ata(d, d);
  Vec aty(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Vec row(d);
    for (int k = 0; k < d; ++k) row[k] = std::pow(x[i], k) / scale[k];
    for (int a = 0; a < d; ++a) {
      aty[a] += row[a] * y[i];
      for (int b = 0; b < d; ++b) ata(a, b) += row[a] * row[b];
    }
  }
  Vec c_scaled;
  solve_linear(ata, aty, c_scaled);
  PolyFit out;
  out.coeffs.resize(d);
  for (int k = 0; k < d; ++k) out.coeffs[k] = c_scaled[k] / scale[k];
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (int k = d - 1; k >= 0; --k) fit = fit * x[i] + out.coeffs[k];
    double r = y[i] - fit;
    ss += r * r;
  }
  out.rms = std::sqrt(ss / n);
  // Coefficient covariance = sigma^2 (A^T A)^-1 in scaled coordinates.
  out.stderrs.assign(d, 0.0);
  if (n > static_cast<std::size_t>(d)) {
    double sigma2 = ss / (static_cast<double>(n) - d);
    Mat inv = inverse(ata);
    for (int k = 0; k < d; ++k)
      out.stderrs[k] = std::sqrt(std::max(0.0, sigma2 * inv(k, k))) / scale[k];
  }
  return out;
}

// Geometric sequence of n points from lo to hi inclusive.
inline std::vector<double> geometric_window(double lo, double hi, int n) {
  std::vector<double> w(n);
  double ratio = std::pow(hi / lo, 1.0 / (n - 1));
  double v = lo;
  for (int i = 0; i < n; ++i) {
    w[i] = v;
    v *= ratio;
  }
  w.back() = hi;
  return w;
}

}  // namespace hodo
