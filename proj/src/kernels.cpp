#include "qnr/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace qnr::kern {

namespace {

struct Table {
  void (*gemm_nn)(std::size_t, std::size_t, std::size_t, cplx, const cplx*, const cplx*, cplx,
                  cplx*);
  void (*gemm_nc)(std::size_t, std::size_t, std::size_t, cplx, const cplx*, const cplx*, cplx,
                  cplx*);
  void (*axpy)(std::size_t, cplx, const cplx*, cplx*);
  cplx (*dotc)(std::size_t, const cplx*, const cplx*);
  void (*scal)(std::size_t, cplx, cplx*);
  double (*nrm2sq)(std::size_t, const cplx*);
};

constexpr Table kScalar = {detail::zgemm_nn_scalar, detail::zgemm_nc_scalar, detail::zaxpy_scalar,
                           detail::zdotc_scalar,    detail::zscal_scalar,    detail::znrm2sq_scalar};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2 = {detail::zgemm_nn_avx2, detail::zgemm_nc_avx2, detail::zaxpy_avx2,
                         detail::zdotc_avx2,    detail::zscal_avx2,    detail::znrm2sq_avx2};
#endif

std::atomic<Backend> g_backend{Backend::scalar};
std::atomic<const Table*> g_table{&kScalar};
std::atomic<bool> g_initialized{false};

bool detect_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
#else
  return false;
#endif
}

void pick_default() {
  Backend want = detect_avx2() ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("QNR_KERNEL_BACKEND")) {
    if (std::strcmp(env, "scalar") == 0) want = Backend::scalar;
    // "avx2" only honored when the CPU has it
  }
  set_backend(want);
  g_initialized.store(true, std::memory_order_release);
}

const Table& table() {
  if (!g_initialized.load(std::memory_order_acquire)) pick_default();
  return *g_table.load(std::memory_order_relaxed);
}

}  // namespace

bool avx2_supported() { return detect_avx2(); }

Backend active() {
  if (!g_initialized.load(std::memory_order_acquire)) pick_default();
  return g_backend.load(std::memory_order_relaxed);
}

bool set_backend(Backend b) {
  switch (b) {
    case Backend::scalar:
      g_table.store(&kScalar);
      g_backend.store(Backend::scalar);
      g_initialized.store(true, std::memory_order_release);
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (detect_avx2()) {
        g_table.store(&kAvx2);
        g_backend.store(Backend::avx2);
        g_initialized.store(true, std::memory_order_release);
        return true;
      }
#endif
      return false;
  }
  return false;
}

void reset_backend() {
  g_initialized.store(false, std::memory_order_release);
  pick_default();
}

void zgemm_nn(std::size_t m, std::size_t k, std::size_t n, cplx alpha, const cplx* a, const cplx* b,
              cplx beta, cplx* c) {
  table().gemm_nn(m, k, n, alpha, a, b, beta, c);
}

void zgemm_nc(std::size_t m, std::size_t k, std::size_t n, cplx alpha, const cplx* a, const cplx* b,
              cplx beta, cplx* c) {
  table().gemm_nc(m, k, n, alpha, a, b, beta, c);
}

void zaxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) { table().axpy(n, alpha, x, y); }

cplx zdotc(std::size_t n, const cplx* x, const cplx* y) { return table().dotc(n, x, y); }

void zscal(std::size_t n, cplx alpha, cplx* x) { table().scal(n, alpha, x); }

double znrm2sq(std::size_t n, const cplx* x) { return table().nrm2sq(n, x); }

}  // namespace qnr::kern
