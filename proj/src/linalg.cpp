#include "qnr/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "qnr/kernels.hpp"

namespace qnr {

CholeskyResult cholesky(const Mat& a, double pivot_rel_tol) {
  if (a.rows() != a.cols()) throw ShapeMismatch("cholesky: square matrix required");
  const std::size_t n = a.rows();
  CholeskyResult res;
  res.L = Mat(n, n);
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(a(i, i)));
  const double floor = std::max(pivot_rel_tol * diag_scale, 1e-300);
  Mat& L = res.L;
  for (std::size_t j = 0; j < n; ++j) {
    cplx sum = a(j, j);
    if (j > 0) sum -= kern::zdotc(j, &L(j, 0), &L(j, 0));
    const double d = sum.real();
    if (!(d > floor)) {
      res.ok = false;
      res.fail_col = j;
      return res;
    }
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = a(i, j);
      if (j > 0) s -= std::conj(kern::zdotc(j, &L(i, 0), &L(j, 0)));
      L(i, j) = s / ljj;
    }
  }
  res.ok = true;
  return res;
}

Mat cholesky_solve(const Mat& L, const Mat& b) {
  const std::size_t n = L.rows();
  if (b.rows() != n) throw ShapeMismatch("cholesky_solve: rhs rows mismatch");
  Mat x = b;
  // forward: L y = b
  for (std::size_t col = 0; col < x.cols(); ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = x(i, col);
      for (std::size_t k = 0; k < i; ++k) s -= L(i, k) * x(k, col);
      x(i, col) = s / L(i, i);
    }
    // backward: L^H x = y
    for (std::size_t ii = n; ii-- > 0;) {
      cplx s = x(ii, col);
      for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(L(k, ii)) * x(k, col);
      x(ii, col) = s / std::conj(L(ii, ii));
    }
  }
  return x;
}

Mat cholesky_inverse(const Mat& L) {
  const std::size_t n = L.rows();
  Mat inv = cholesky_solve(L, Mat::identity(n));
  return hermitize(inv);
}

double cholesky_logdet(const Mat& L) {
  double s = 0.0;
  for (std::size_t i = 0; i < L.rows(); ++i) s += std::log(L(i, i).real());
  return 2.0 * s;
}

Mat lu_inverse(const Mat& a, double pivot_rel_tol) {
  if (a.rows() != a.cols()) throw ShapeMismatch("lu_inverse: square matrix required");
  const std::size_t n = a.rows();
  Mat lu = a;
  Mat x = Mat::identity(n);
  const double floor = std::max(pivot_rel_tol * max_abs(a), 1e-300);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(lu(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(lu(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best <= floor) throw SingularMatrix("matrix is numerically singular");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(lu(piv, j), lu(col, j));
        std::swap(x(piv, j), x(col, j));
      }
    }
    const cplx d = lu(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const cplx f = lu(r, col) / d;
      if (f == cplx(0.0)) continue;
      lu(r, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) lu(r, j) -= f * lu(col, j);
      for (std::size_t j = 0; j < n; ++j) x(r, j) -= f * x(col, j);
    }
  }
  // back substitution
  for (std::size_t col = n; col-- > 0;) {
    const cplx d = lu(col, col);
    for (std::size_t j = 0; j < n; ++j) x(col, j) /= d;
    for (std::size_t r = 0; r < col; ++r) {
      const cplx f = lu(r, col);
      if (f == cplx(0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) x(r, j) -= f * x(col, j);
    }
  }
  return x;
}

std::vector<double> eigvals_hermitian(const Mat& a) {
  if (a.rows() != a.cols()) throw ShapeMismatch("eigvals_hermitian: square matrix required");
  const std::size_t n = a.rows();
  if (n == 0) return {};
  Mat m = hermitize(a);
  const double scale = std::max(max_abs(m), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(m(p, q));
    if (off <= 1e-30 * scale * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = m(p, q);
        const double g = std::abs(apq);
        if (g <= 1e-18 * scale) continue;
        const cplx phase = apq / g;  // e^{i phi}
        const double alpha = m(p, p).real();
        const double beta = m(q, q).real();
        // small root of t^2 - 2 tau t - 1 = 0 for the annihilating rotation
        const double tau = (beta - alpha) / (2.0 * g);
        const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // columns: v11=c, v12=-s*phase, v21=s*conj(phase), v22=c
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = m(k, p), akq = m(k, q);
          m(k, p) = c * akp + s * std::conj(phase) * akq;
          m(k, q) = -s * phase * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = m(p, k), aqk = m(q, k);
          m(p, k) = c * apk + s * phase * aqk;
          m(q, k) = -s * std::conj(phase) * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

double min_eigenvalue_hermitian(const Mat& a) {
  auto ev = eigvals_hermitian(a);
  return ev.empty() ? 0.0 : ev.front();
}

MgsResult mgs_orthonormalize(const Mat& a) {
  if (a.rows() < a.cols()) throw ShapeMismatch("mgs: need rows >= cols");
  const std::size_t n = a.rows(), m = a.cols();
  MgsResult res;
  res.q = a;
  res.rdiag.assign(m, cplx(0.0));
  Mat& q = res.q;
  std::vector<cplx> col(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cplx proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += std::conj(q(i, k)) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(q(i, j));
    nrm = std::sqrt(nrm);
    if (nrm < 1e-14) throw SingularMatrix("mgs: rank deficient input");
    res.rdiag[j] = nrm;  // diagonal made real-positive by normalization below
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
  return res;
}

}  // namespace qnr
