#include "qnr/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

// AVX2+FMA variants. Complex doubles are interleaved [re, im], so one __m256d
// holds two complex values. This TU is compiled with -mavx2 -mfma; callers must
// only reach it through the runtime dispatcher.
namespace qnr::kern::detail {

namespace {

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

// (ar + i*ai) * v for two interleaved complex values in v.
inline __m256d cmul_broadcast(__m256d var, __m256d vai, __m256d v) {
  const __m256d vswap = _mm256_permute_pd(v, 0b0101);
  return _mm256_fmaddsub_pd(var, v, _mm256_mul_pd(vai, vswap));
}

}  // namespace

void zgemm_nn_avx2(std::size_t m, std::size_t k, std::size_t n, cplx alpha, const cplx* a,
                   const cplx* b, cplx beta, cplx* c) {
  const std::size_t n2 = n / 2 * 2;
  for (std::size_t i = 0; i < m; ++i) {
    cplx* crow = c + i * n;
    if (beta == cplx(0.0)) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    } else if (beta != cplx(1.0)) {
      zscal_avx2(n, beta, crow);
    }
    for (std::size_t p = 0; p < k; ++p) {
      const cplx aip = alpha * a[i * k + p];
      if (aip == cplx(0.0)) continue;
      const __m256d var = _mm256_set1_pd(aip.real());
      const __m256d vai = _mm256_set1_pd(aip.imag());
      const cplx* brow = b + p * n;
      std::size_t j = 0;
      for (; j < n2; j += 2) {
        const __m256d vb = _mm256_loadu_pd(dp(brow + j));
        const __m256d vc = _mm256_loadu_pd(dp(crow + j));
        _mm256_storeu_pd(dp(crow + j), _mm256_add_pd(vc, cmul_broadcast(var, vai, vb)));
      }
      for (; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

namespace {

// sum over p of conj(x[p]) * y[p], vector core shared by zdotc / zgemm_nc.
inline cplx dotc_core(std::size_t n, const cplx* x, const cplx* y) {
  const std::size_t n2 = n / 2 * 2;
  __m256d acc_same = _mm256_setzero_pd();  // xr*yr and xi*yi in alternating lanes
  __m256d acc_cross = _mm256_setzero_pd(); // xr*yi and xi*yr in alternating lanes
  std::size_t p = 0;
  for (; p < n2; p += 2) {
    const __m256d vx = _mm256_loadu_pd(dp(x + p));
    const __m256d vy = _mm256_loadu_pd(dp(y + p));
    acc_same = _mm256_fmadd_pd(vx, vy, acc_same);
    acc_cross = _mm256_fmadd_pd(vx, _mm256_permute_pd(vy, 0b0101), acc_cross);
  }
  alignas(32) double s[4], t[4];
  _mm256_store_pd(s, acc_same);
  _mm256_store_pd(t, acc_cross);
  double re = s[0] + s[1] + s[2] + s[3];
  double im = (t[0] + t[2]) - (t[1] + t[3]);
  for (; p < n; ++p) {
    re += x[p].real() * y[p].real() + x[p].imag() * y[p].imag();
    im += x[p].real() * y[p].imag() - x[p].imag() * y[p].real();
  }
  return {re, im};
}

}  // namespace

void zgemm_nc_avx2(std::size_t m, std::size_t k, std::size_t n, cplx alpha, const cplx* a,
                   const cplx* b, cplx beta, cplx* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const cplx* arow = a + i * k;
    cplx* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx acc = dotc_core(k, b + j * k, arow);
      crow[j] = (beta == cplx(0.0)) ? alpha * acc : beta * crow[j] + alpha * acc;
    }
  }
}

void zaxpy_avx2(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  const __m256d var = _mm256_set1_pd(alpha.real());
  const __m256d vai = _mm256_set1_pd(alpha.imag());
  const std::size_t n2 = n / 2 * 2;
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    const __m256d vx = _mm256_loadu_pd(dp(x + i));
    const __m256d vy = _mm256_loadu_pd(dp(y + i));
    _mm256_storeu_pd(dp(y + i), _mm256_add_pd(vy, cmul_broadcast(var, vai, vx)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

cplx zdotc_avx2(std::size_t n, const cplx* x, const cplx* y) { return dotc_core(n, x, y); }

void zscal_avx2(std::size_t n, cplx alpha, cplx* x) {
  const __m256d var = _mm256_set1_pd(alpha.real());
  const __m256d vai = _mm256_set1_pd(alpha.imag());
  const std::size_t n2 = n / 2 * 2;
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    const __m256d vx = _mm256_loadu_pd(dp(x + i));
    _mm256_storeu_pd(dp(x + i), cmul_broadcast(var, vai, vx));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double znrm2sq_avx2(std::size_t n, const cplx* x) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n2 = n / 2 * 2;
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    const __m256d vx = _mm256_loadu_pd(dp(x + i));
    acc = _mm256_fmadd_pd(vx, vx, acc);
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  double r = s[0] + s[1] + s[2] + s[3];
  for (; i < n; ++i) r += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return r;
}

}  // namespace qnr::kern::detail

#endif  // x86-64
