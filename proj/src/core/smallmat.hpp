#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace hodo {

using Vec = std::vector<double>;

// Dense row-major matrix sized for hodograph work (n is the spatial
// dimension, so 2 or 3 almost always, occasionally a few more).
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : r_(rows), c_(cols), a_(rows * cols, fill) {}
  Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> vals);

  static Mat identity(std::size_t n);

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }
  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  Mat transpose() const;
  double max_abs() const;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }
  friend Mat operator*(const Mat& a, const Mat& b);
  friend Vec operator*(const Mat& a, const Vec& v);
  friend bool operator==(const Mat& a, const Mat& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
  }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<double> a_;
};

// Vector helpers.
double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double norm_inf(const Vec& a);
Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);

// Determinant: closed form for n <= 3, complete-pivot elimination beyond.
double det(const Mat& m);

// Adjugate (transposed cofactor matrix), satisfying M * adj(M) = det(M) * I.
// Cofactors for n <= 3, Faddeev-LeVerrier recursion beyond.
Mat adjugate(const Mat& m);

// Coefficients a_0..a_{n-1} of det(t I + J) = t^n + a_{n-1} t^{n-1} + ... + a_0.
// Exact trace/minor formulas for n <= 3, Faddeev-LeVerrier otherwise.
Vec char_coeffs(const Mat& j);

// Matrices G_0..G_{n-1} with adj(t I + J) = sum_k G_k t^k. Together with
// char_coeffs this gives the adjugate and its exact t-derivative at any t.
std::vector<Mat> adjugate_poly(const Mat& j);

// Rank by complete-pivot Gaussian elimination; pivots with magnitude
// <= tol * (largest pivot) count as zero. tol is relative.
int numerical_rank(const Mat& m, double tol);

// Orthonormal bases of the right/left null spaces under the same pivoting.
// Deterministic: fixed pivot order, modified Gram-Schmidt in fixed order, and
// the first component exceeding 1e-12 * ||v|| is made positive.
std::vector<Vec> right_null_space(const Mat& m, double tol);
std::vector<Vec> left_null_space(const Mat& m, double tol);

// Solve A x = b by elimination with partial pivoting. Returns false when A is
// numerically singular.
bool solve_linear(const Mat& a, const Vec& b, Vec& x);

// Inverse via per-column solves. Throws errc::singular when not invertible.
Mat inverse(const Mat& a);

}  // namespace hodo
