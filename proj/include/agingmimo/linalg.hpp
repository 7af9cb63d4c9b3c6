#pragma once

#include "agingmimo/types.hpp"

namespace agingmimo {

/// (A + A^H) / 2.
MatC hermitize(const MatC& a);

/// Frobenius inner product <A, B> = sum_ij A_ij conj(B_ij) = tr(A B^H).
/// Conjugates the second argument.
cxd frob_inner(const MatC& a, const MatC& b);

/// Solve (A) X = B for Hermitian positive semidefinite A.  Uses a Cholesky
/// factorization; if A is singular or indefinite at working precision the
/// diagonal is floored by rel_floor * trace(A) / n and the solve is retried.
MatC solve_hpsd(const MatC& a, const MatC& b, double rel_floor = 1e-12);

/// A^{-1/2} for Hermitian PSD A via eigendecomposition.  Eigenvalues below
/// rel_floor * lambda_max are raised to that threshold before inversion unless
/// flooring is disabled, in which case near-null directions produce inf/nan
/// and the caller owns the consequences.
MatC inv_sqrt_hpsd(const MatC& a, double rel_floor = 1e-12, bool allow_floor = true);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const MatC& a);

/// Cholesky-like factor L with L L^H = A for Hermitian PSD A (eigenvalue
/// construction, tolerant of semidefinite inputs; negative dust is clipped).
MatC psd_factor(const MatC& a);

/// Kronecker product a (x) b.
MatC kron(const MatC& a, const MatC& b);

/// Column-stack a matrix into a vector (row index fastest).
VecC vec(const MatC& m);

/// Inverse of vec: rebuild the rows x cols matrix.
MatC unvec(const VecC& v, int rows, int cols);

}  // namespace agingmimo
