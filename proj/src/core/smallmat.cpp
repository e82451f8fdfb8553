#include "core/smallmat.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace hodo {

Mat::Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> vals)
    : r_(rows), c_(cols), a_(vals) {
  assert(a_.size() == rows * cols);
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::transpose() const {
  Mat t(c_, r_);
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Mat::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

Mat& Mat::operator+=(const Mat& o) {
  assert(r_ == o.r_ && c_ == o.c_);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  assert(r_ == o.r_ && c_ == o.c_);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
  assert(a.c_ == b.r_);
  Mat out(a.r_, b.c_);
  for (std::size_t i = 0; i < a.r_; ++i)
    for (std::size_t k = 0; k < a.c_; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.c_; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Vec operator*(const Mat& a, const Vec& v) {
  assert(a.c_ == v.size());
  Vec out(a.r_, 0.0);
  for (std::size_t i = 0; i < a.r_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.c_; ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

Vec operator+(Vec a, const Vec& b) {
  assert(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Vec operator-(Vec a, const Vec& b) {
  assert(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

Vec operator*(double s, Vec a) {
  for (double& v : a) v *= s;
  return a;
}

namespace {

// Elimination with full (row and column) pivoting. Returns the reduced
// matrix, the permutations, and the pivot magnitudes in elimination order.
struct FullPivot {
  Mat u;
  std::vector<std::size_t> row_perm, col_perm;
  std::vector<double> pivots;
};

FullPivot full_pivot_eliminate(const Mat& m) {
  FullPivot fp{m, {}, {}, {}};
  const std::size_t r = m.rows(), c = m.cols();
  fp.row_perm.resize(r);
  fp.col_perm.resize(c);
  std::iota(fp.row_perm.begin(), fp.row_perm.end(), 0u);
  std::iota(fp.col_perm.begin(), fp.col_perm.end(), 0u);
  Mat& u = fp.u;
  const std::size_t steps = std::min(r, c);
  for (std::size_t k = 0; k < steps; ++k) {
    std::size_t pi = k, pj = k;
    double best = 0.0;
    for (std::size_t i = k; i < r; ++i)
      for (std::size_t j = k; j < c; ++j) {
        double v = std::fabs(u(i, j));
        if (v > best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    fp.pivots.push_back(best);
    if (best == 0.0) break;
    if (pi != k) {
      for (std::size_t j = 0; j < c; ++j) std::swap(u(k, j), u(pi, j));
      std::swap(fp.row_perm[k], fp.row_perm[pi]);
    }
    if (pj != k) {
      for (std::size_t i = 0; i < r; ++i) std::swap(u(i, k), u(i, pj));
      std::swap(fp.col_perm[k], fp.col_perm[pj]);
    }
    for (std::size_t i = k + 1; i < r; ++i) {
      double f = u(i, k) / u(k, k);
      u(i, k) = 0.0;
      for (std::size_t j = k + 1; j < c; ++j) u(i, j) -= f * u(k, j);
    }
  }
  return fp;
}

int rank_of(const FullPivot& fp, double tol) {
  if (fp.pivots.empty() || fp.pivots[0] == 0.0) return 0;
  double thresh = tol * fp.pivots[0];
  int r = 0;
  for (double p : fp.pivots) {
    if (p > thresh)
      ++r;
    else
      break;
  }
  return r;
}

void normalize_sign(Vec& v) {
  double n = norm(v);
  for (double x : v) {
    if (std::fabs(x) > 1e-12 * n) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

// Modified Gram-Schmidt in the given order; vectors assumed independent.
void orthonormalize(std::vector<Vec>& basis) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double p = dot(basis[i], basis[j]);
      for (std::size_t k = 0; k < basis[i].size(); ++k)
        basis[i][k] -= p * basis[j][k];
    }
    double n = norm(basis[i]);
    for (double& x : basis[i]) x /= n;
    normalize_sign(basis[i]);
  }
}

double det_elimination(const Mat& m) {
  FullPivot fp = full_pivot_eliminate(m);
  const std::size_t n = m.rows();
  double d = 1.0;
  for (std::size_t k = 0; k < n; ++k) d *= fp.u(k, k);
  // Count permutation parity of both row and column swaps.
  auto parity = [](std::vector<std::size_t> p) {
    int sign = 1;
    for (std::size_t i = 0; i < p.size(); ++i)
      while (p[i] != i) {
        std::swap(p[i], p[p[i]]);
        sign = -sign;
      }
    return sign;
  };
  return d * parity(fp.row_perm) * parity(fp.col_perm);
}

// Faddeev-LeVerrier on A: returns the char-poly coefficients c_0..c_{n-1} of
// det(s I - A) = s^n + c_{n-1} s^{n-1} + ... + c_0 and adj(A).
struct FaddeevResult {
  Vec coeffs;
  Mat adj;
};

FaddeevResult faddeev_leverrier(const Mat& a) {
  const std::size_t n = a.rows();
  Vec c(n, 0.0);
  Mat b = Mat::identity(n);
  Mat b_prev = b;
  double ck = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    Mat ab = a * b;
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += ab(i, i);
    ck = -tr / static_cast<double>(k);
    c[n - k] = ck;
    b_prev = b;
    b = ab;
    for (std::size_t i = 0; i < n; ++i) b(i, i) += ck;
  }
  // After n steps b = A B_n + c_0 I = 0 and b_prev = B_n = (-1)^{n-1} adj(A).
  Mat adj = b_prev;
  if (n % 2 == 0) adj *= -1.0;
  return {c, adj};
}

}  // namespace

double det(const Mat& m) {
  const std::size_t n = m.rows();
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return det_elimination(m);
  }
}

Mat adjugate(const Mat& m) {
  const std::size_t n = m.rows();
  if (n == 1) {
    Mat a(1, 1);
    a(0, 0) = 1.0;
    return a;
  }
  if (n == 2) {
    return Mat(2, 2, {m(1, 1), -m(0, 1), -m(1, 0), m(0, 0)});
  }
  if (n == 3) {
    Mat a(3, 3);
    a(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    a(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    a(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    a(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    a(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    a(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    a(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    a(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    a(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return a;
  }
  return faddeev_leverrier(m).adj;
}

Vec char_coeffs(const Mat& j) {
  const std::size_t n = j.rows();
  if (n == 1) return {j(0, 0)};
  if (n == 2) return {det(j), j(0, 0) + j(1, 1)};
  if (n == 3) {
    double tr = j(0, 0) + j(1, 1) + j(2, 2);
    double m01 = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
    double m02 = j(0, 0) * j(2, 2) - j(0, 2) * j(2, 0);
    double m12 = j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1);
    return {det(j), m01 + m02 + m12, tr};
  }
  // det(t I + J) is the char poly of -J evaluated with s = t.
  Mat neg = j;
  neg *= -1.0;
  return faddeev_leverrier(neg).coeffs;
}

std::vector<Mat> adjugate_poly(const Mat& j) {
  const std::size_t n = j.rows();
  Vec a = char_coeffs(j);
  a.push_back(1.0);  // a_n = 1
  // G_k = sum_{i=0}^{n-1-k} a_{k+i+1} (-J)^i. Powers of -J computed once.
  std::vector<Mat> pw;
  pw.push_back(Mat::identity(n));
  Mat neg = j;
  neg *= -1.0;
  for (std::size_t i = 1; i < n; ++i) pw.push_back(pw.back() * neg);
  std::vector<Mat> g;
  for (std::size_t k = 0; k < n; ++k) {
    Mat gk(n, n);
    for (std::size_t i = 0; i + k + 1 <= n; ++i) {
      Mat term = pw[i];
      term *= a[k + i + 1];
      gk += term;
    }
    g.push_back(gk);
  }
  return g;
}

int numerical_rank(const Mat& m, double tol) {
  return rank_of(full_pivot_eliminate(m), tol);
}

std::vector<Vec> right_null_space(const Mat& m, double tol) {
  FullPivot fp = full_pivot_eliminate(m);
  const std::size_t n = m.cols();
  int r = rank_of(fp, tol);
  std::vector<Vec> basis;
  // Back substitution for each free (permuted) column.
  for (std::size_t free_col = r; free_col < n; ++free_col) {
    Vec y(n, 0.0);  // solution in permuted column coordinates
    y[free_col] = 1.0;
    for (int i = r - 1; i >= 0; --i) {
      double s = 0.0;
      for (std::size_t jj = i + 1; jj < n; ++jj) s += fp.u(i, jj) * y[jj];
      y[i] = -s / fp.u(i, i);
    }
    Vec v(n, 0.0);
    for (std::size_t jj = 0; jj < n; ++jj) v[fp.col_perm[jj]] = y[jj];
    basis.push_back(v);
  }
  orthonormalize(basis);
  return basis;
}

std::vector<Vec> left_null_space(const Mat& m, double tol) {
  return right_null_space(m.transpose(), tol);
}

bool solve_linear(const Mat& a, const Vec& b, Vec& x) {
  const std::size_t n = a.rows();
  Mat u = a;
  Vec rhs = b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(u(i, k)) > std::fabs(u(p, k))) p = i;
    if (std::fabs(u(p, k)) < 1e-300) return false;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(u(k, j), u(p, j));
      std::swap(rhs[k], rhs[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = u(i, k) / u(k, k);
      u(i, k) = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) u(i, j) -= f * u(k, j);
      rhs[i] -= f * rhs[k];
    }
  }
  x.assign(n, 0.0);
  for (int i = static_cast<int>(n) - 1; i >= 0; --i) {
    double s = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= u(i, j) * x[j];
    x[i] = s / u(i, i);
  }
  return true;
}

Mat inverse(const Mat& a) {
  const std::size_t n = a.rows();
  Mat out(n, n);
  Vec col(n), e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    if (!solve_linear(a, e, col)) fail(errc::singular, "matrix not invertible");
    for (std::size_t i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

}  // namespace hodo
