#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "qnr/errors.hpp"

namespace qnr {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Real-mode data simply carries zero imaginary
// parts; at desk scale the uniform representation beats a templated split.
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, cplx(0.0)) {}
  Mat(std::size_t rows, std::size_t cols, std::initializer_list<cplx> entries)
      : rows_(rows), cols_(cols), a_(entries) {
    if (a_.size() != rows * cols) throw ShapeMismatch("initializer size does not match shape");
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return a_.size(); }
  bool empty() const { return a_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }

  bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  std::size_t rows_, cols_;
  std::vector<cplx> a_;
};

// Arithmetic (kernel-backed where it matters).
Mat operator*(const Mat& a, const Mat& b);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(cplx s, const Mat& a);
Mat operator-(const Mat& a);
Mat& operator+=(Mat& a, const Mat& b);
Mat& operator-=(Mat& a, const Mat& b);

// a * b^H without materializing the adjoint.
Mat matmul_nc(const Mat& a, const Mat& b);
// gemm with accumulate: c += alpha * a * b
void gemm_acc(Mat& c, cplx alpha, const Mat& a, const Mat& b);
// c += alpha * a * b^H
void gemm_nc_acc(Mat& c, cplx alpha, const Mat& a, const Mat& b);

Mat adjoint(const Mat& a);
Mat transpose(const Mat& a);
Mat conj(const Mat& a);
Mat real_part(const Mat& a);  // imaginary parts dropped

cplx trace(const Mat& a);
double frobenius(const Mat& a);
double max_abs(const Mat& a);
double max_abs_diff(const Mat& a, const Mat& b);
// sum conj(a[i]) b[i] over all entries (Frobenius inner product)
cplx fdot(const Mat& a, const Mat& b);

// (a + a^H) / 2
Mat hermitize(const Mat& a);
bool is_hermitian(const Mat& a, double tol);
double max_imag(const Mat& a);

// Columns [c0, c1) as a copy.
Mat col_block(const Mat& a, std::size_t c0, std::size_t c1);
void set_col_block(Mat& a, std::size_t c0, const Mat& block);
Mat hcat(const Mat& a, const Mat& b);

// Column-vector helpers (n x 1 matrices).
Mat col_vec(const std::vector<cplx>& v);
Mat col_vec_real(const std::vector<double>& v);
double norm2(const Mat& v);

}  // namespace qnr
