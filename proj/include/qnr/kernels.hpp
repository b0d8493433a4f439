#pragma once

#include <complex>
#include <cstddef>

// Dense complex-double primitives behind the matrix layer. Every op has a
// scalar reference kernel and, on x86-64 with AVX2+FMA, a vectorized variant;
// the backend is chosen once at runtime and can be forced for testing.
namespace qnr::kern {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

// Backend currently in use.
Backend active();

// Force a backend. Returns false (and leaves the backend unchanged) if the
// CPU cannot run it.
bool set_backend(Backend b);

// Re-run CPU detection and pick the best available backend.
void reset_backend();

// True if the AVX2 variant can run on this CPU.
bool avx2_supported();

// C[m x n] = alpha * A[m x k] * B[k x n] + beta * C   (row-major, no aliasing)
void zgemm_nn(std::size_t m, std::size_t k, std::size_t n, cplx alpha, const cplx* a,
              const cplx* b, cplx beta, cplx* c);

// C[m x n] = alpha * A[m x k] * B^H + beta * C, where B is n x k row-major.
void zgemm_nc(std::size_t m, std::size_t k, std::size_t n, cplx alpha, const cplx* a,
              const cplx* b, cplx beta, cplx* c);

// y += alpha * x
void zaxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y);

// sum conj(x[i]) * y[i]
cplx zdotc(std::size_t n, const cplx* x, const cplx* y);

// x *= alpha
void zscal(std::size_t n, cplx alpha, cplx* x);

// sum |x[i]|^2
double znrm2sq(std::size_t n, const cplx* x);

namespace detail {
// Scalar reference implementations: the semantics the SIMD variants must match.
void zgemm_nn_scalar(std::size_t, std::size_t, std::size_t, cplx, const cplx*, const cplx*, cplx,
                     cplx*);
void zgemm_nc_scalar(std::size_t, std::size_t, std::size_t, cplx, const cplx*, const cplx*, cplx,
                     cplx*);
void zaxpy_scalar(std::size_t, cplx, const cplx*, cplx*);
cplx zdotc_scalar(std::size_t, const cplx*, const cplx*);
void zscal_scalar(std::size_t, cplx, cplx*);
double znrm2sq_scalar(std::size_t, const cplx*);

#if defined(__x86_64__) || defined(_M_X64)
void zgemm_nn_avx2(std::size_t, std::size_t, std::size_t, cplx, const cplx*, const cplx*, cplx,
                   cplx*);
void zgemm_nc_avx2(std::size_t, std::size_t, std::size_t, cplx, const cplx*, const cplx*, cplx,
                   cplx*);
void zaxpy_avx2(std::size_t, cplx, const cplx*, cplx*);
cplx zdotc_avx2(std::size_t, const cplx*, const cplx*);
void zscal_avx2(std::size_t, cplx, cplx*);
double znrm2sq_avx2(std::size_t, const cplx*);
#endif
}  // namespace detail

}  // namespace qnr::kern
