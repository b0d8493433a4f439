#include "qnr/kernels.hpp"

namespace qnr::kern::detail {

void zgemm_nn_scalar(std::size_t m, std::size_t k, std::size_t n, cplx alpha, const cplx* a,
                     const cplx* b, cplx beta, cplx* c) {
  for (std::size_t i = 0; i < m; ++i) {
    cplx* crow = c + i * n;
    if (beta == cplx(0.0)) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    } else if (beta != cplx(1.0)) {
      for (std::size_t j = 0; j < n; ++j) crow[j] *= beta;
    }
    for (std::size_t p = 0; p < k; ++p) {
      const cplx aip = alpha * a[i * k + p];
      if (aip == cplx(0.0)) continue;
      const cplx* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void zgemm_nc_scalar(std::size_t m, std::size_t k, std::size_t n, cplx alpha, const cplx* a,
                     const cplx* b, cplx beta, cplx* c) {
  // B is n x k row-major; C(i,j) = alpha * sum_p A(i,p) * conj(B(j,p)) + beta C(i,j)
  for (std::size_t i = 0; i < m; ++i) {
    const cplx* arow = a + i * k;
    cplx* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx* brow = b + j * k;
      cplx acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * std::conj(brow[p]);
      crow[j] = (beta == cplx(0.0)) ? alpha * acc : beta * crow[j] + alpha * acc;
    }
  }
}

void zaxpy_scalar(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

cplx zdotc_scalar(std::size_t n, const cplx* x, const cplx* y) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

void zscal_scalar(std::size_t n, cplx alpha, cplx* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double znrm2sq_scalar(std::size_t n, const cplx* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return acc;
}

}  // namespace qnr::kern::detail
