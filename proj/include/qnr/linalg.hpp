#pragma once

#include <optional>
#include <vector>

#include "qnr/matrix.hpp"

namespace qnr {

// Cholesky factorization A = L L^H of a Hermitian positive definite matrix.
struct CholeskyResult {
  bool ok = false;
  Mat L;                 // lower triangular, positive real diagonal (valid iff ok)
  std::size_t fail_col = 0;  // first column whose pivot was not positive
};

// Factor a Hermitian matrix; ok=false when a pivot drops below
// pivot_rel_tol * max(|diag|).
CholeskyResult cholesky(const Mat& a, double pivot_rel_tol = 1e-14);

// Solve (L L^H) X = B given the factor.
Mat cholesky_solve(const Mat& L, const Mat& b);

// Inverse of the factored matrix, exactly Hermitian.
Mat cholesky_inverse(const Mat& L);

// log det of the factored matrix.
double cholesky_logdet(const Mat& L);

// General inverse via partially pivoted LU. Throws SingularMatrix.
Mat lu_inverse(const Mat& a, double pivot_rel_tol = 1e-13);

// Eigenvalues of a Hermitian matrix (ascending), cyclic complex Jacobi.
std::vector<double> eigvals_hermitian(const Mat& a);

double min_eigenvalue_hermitian(const Mat& a);

// Orthonormalize the columns of a (rows >= cols) by twice-iterated modified
// Gram-Schmidt; returns Q with Q^H Q = I and the R diagonal (for phase fixes).
struct MgsResult {
  Mat q;
  std::vector<cplx> rdiag;
};
MgsResult mgs_orthonormalize(const Mat& a);

}  // namespace qnr
