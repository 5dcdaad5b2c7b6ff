#pragma once

#include <Eigen/Dense>

namespace sae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin singular value decomposition A = U diag(s) V^T with k = min(m, n).
///
/// Columns of U and V are orthonormal, s is nonincreasing and nonnegative.
/// Each column of U has its largest-magnitude entry positive (V follows).
struct ThinSVD {
    Matrix U;
    Vector s;
    Matrix V;
};

/// One-sided Jacobi SVD. Throws NumericalError after 60 sweeps without
/// convergence. Left singular vectors of (numerically) zero singular values
/// are filled in by an orthonormal completion so U^T U = I always holds.
ThinSVD thin_svd(const Matrix& a);

/// First `ncols` columns of the orthogonal factor of a Householder QR of `a`
/// (no sign normalization). `ncols` may exceed a.cols(), up to a.rows(); the
/// extra columns then span the orthogonal complement of the leading ones.
Matrix householder_q(const Matrix& a, Eigen::Index ncols);

/// Orthonormalization: Q factor of the thin Householder QR of `a` (m >= n),
/// with column signs chosen so that R has a nonnegative diagonal.
Matrix pi_orth(const Matrix& a);

/// `count` orthonormal columns orthogonal to span(basis). `basis` must have
/// orthonormal columns and basis.cols() + count <= basis.rows().
Matrix orthonormal_completion(const Matrix& basis, Eigen::Index count);

/// Flips column signs so the largest-magnitude entry of each column of `u` is
/// positive; the same flips are applied to `v` when given.
void fix_column_signs(Matrix& u, Matrix* v = nullptr);

/// Empirical covariance of the columns of a snapshot matrix under the 1/S law.
struct CovarianceSpectrum {
    Vector mean;      // row-wise sample mean (n0)
    Matrix eigvecs;   // n0 x k, k = min(n0, S)
    Vector eigvals;   // nonincreasing, length k
};

CovarianceSpectrum covariance_spectrum(const Matrix& snapshots);

/// Sum of eigvals[i] for i >= n (0-based), i.e. the POD tail beyond n modes.
double tail_sum(const Vector& eigvals, Eigen::Index n);

/// Subtracts `mean` from each column.
Matrix center_columns(const Matrix& snapshots, const Vector& mean);

double max_abs(const Matrix& m);

/// max |Q^T Q - I|.
double orthonormality_defect(const Matrix& q);

}  // namespace sae
