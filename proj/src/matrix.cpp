#include "qnr/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "qnr/kernels.hpp"

namespace qnr {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw ShapeMismatch(what);
}
}  // namespace

Mat operator*(const Mat& a, const Mat& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Mat c(a.rows(), b.cols());
  if (!c.empty() && a.cols() != 0)
    kern::zgemm_nn(a.rows(), a.cols(), b.cols(), 1.0, a.data(), b.data(), 0.0, c.data());
  return c;
}

Mat matmul_nc(const Mat& a, const Mat& b) {
  require(a.cols() == b.cols(), "matmul_nc: contraction dimensions differ");
  Mat c(a.rows(), b.rows());
  if (!c.empty() && a.cols() != 0)
    kern::zgemm_nc(a.rows(), a.cols(), b.rows(), 1.0, a.data(), b.data(), 0.0, c.data());
  return c;
}

void gemm_acc(Mat& c, cplx alpha, const Mat& a, const Mat& b) {
  require(a.cols() == b.rows() && c.rows() == a.rows() && c.cols() == b.cols(),
          "gemm_acc: shape mismatch");
  if (!c.empty() && a.cols() != 0)
    kern::zgemm_nn(a.rows(), a.cols(), b.cols(), alpha, a.data(), b.data(), 1.0, c.data());
}

void gemm_nc_acc(Mat& c, cplx alpha, const Mat& a, const Mat& b) {
  require(a.cols() == b.cols() && c.rows() == a.rows() && c.cols() == b.rows(),
          "gemm_nc_acc: shape mismatch");
  if (!c.empty() && a.cols() != 0)
    kern::zgemm_nc(a.rows(), a.cols(), b.rows(), alpha, a.data(), b.data(), 1.0, c.data());
}

Mat operator+(const Mat& a, const Mat& b) {
  require(a.same_shape(b), "add: shape mismatch");
  Mat c = a;
  kern::zaxpy(c.size(), 1.0, b.data(), c.data());
  return c;
}

Mat operator-(const Mat& a, const Mat& b) {
  require(a.same_shape(b), "sub: shape mismatch");
  Mat c = a;
  kern::zaxpy(c.size(), -1.0, b.data(), c.data());
  return c;
}

Mat operator*(cplx s, const Mat& a) {
  Mat c = a;
  kern::zscal(c.size(), s, c.data());
  return c;
}

Mat operator-(const Mat& a) { return cplx(-1.0) * a; }

Mat& operator+=(Mat& a, const Mat& b) {
  require(a.same_shape(b), "add: shape mismatch");
  kern::zaxpy(a.size(), 1.0, b.data(), a.data());
  return a;
}

Mat& operator-=(Mat& a, const Mat& b) {
  require(a.same_shape(b), "sub: shape mismatch");
  kern::zaxpy(a.size(), -1.0, b.data(), a.data());
  return a;
}

Mat adjoint(const Mat& a) {
  Mat c(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
  return c;
}

Mat transpose(const Mat& a) {
  Mat c(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = a(i, j);
  return c;
}

Mat conj(const Mat& a) {
  Mat c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = std::conj(c.data()[i]);
  return c;
}

Mat real_part(const Mat& a) {
  Mat c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = c.data()[i].real();
  return c;
}

cplx trace(const Mat& a) {
  cplx t = 0.0;
  const std::size_t n = std::min(a.rows(), a.cols());
  for (std::size_t i = 0; i < n; ++i) t += a(i, i);
  return t;
}

double frobenius(const Mat& a) { return std::sqrt(kern::znrm2sq(a.size(), a.data())); }

double max_abs(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
  return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

cplx fdot(const Mat& a, const Mat& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("fdot: shape mismatch");
  return kern::zdotc(a.size(), a.data(), b.data());
}

Mat hermitize(const Mat& a) {
  require(a.rows() == a.cols(), "hermitize: square required");
  Mat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      c(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return c;
}

bool is_hermitian(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
  return true;
}

double max_imag(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i].imag()));
  return m;
}

Mat col_block(const Mat& a, std::size_t c0, std::size_t c1) {
  require(c0 <= c1 && c1 <= a.cols(), "col_block: range out of bounds");
  Mat c(a.rows(), c1 - c0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = c0; j < c1; ++j) c(i, j - c0) = a(i, j);
  return c;
}

void set_col_block(Mat& a, std::size_t c0, const Mat& block) {
  require(block.rows() == a.rows() && c0 + block.cols() <= a.cols(),
          "set_col_block: range out of bounds");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < block.cols(); ++j) a(i, c0 + j) = block(i, j);
}

Mat hcat(const Mat& a, const Mat& b) {
  if (a.empty() && a.rows() == 0) return b;
  if (b.empty() && b.rows() == 0) return a;
  require(a.rows() == b.rows(), "hcat: row counts differ");
  Mat c(a.rows(), a.cols() + b.cols());
  set_col_block(c, 0, a);
  set_col_block(c, a.cols(), b);
  return c;
}

Mat col_vec(const std::vector<cplx>& v) {
  Mat c(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) c(i, 0) = v[i];
  return c;
}

Mat col_vec_real(const std::vector<double>& v) {
  Mat c(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) c(i, 0) = v[i];
  return c;
}

double norm2(const Mat& v) { return frobenius(v); }

}  // namespace qnr
