#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "core/errors.hpp"
#include "core/smallmat.hpp"

namespace hodo::testutil {

// Runs fn and reports the error code it threw, if any. Keeps error-path
// checks one-liners: CHECK(code_of(...) == errc::parse).
inline std::optional<errc> code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec random_vec(std::mt19937& rng, std::size_t n, double lo, double hi) {
  Vec v(n);
  for (double& x : v) x = uniform(rng, lo, hi);
  return v;
}

inline Mat random_mat(std::mt19937& rng, std::size_t n, double lo, double hi) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = uniform(rng, lo, hi);
  return m;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::fabs(a(i, j) - b(i, j)));
  return worst;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

}  // namespace hodo::testutil
