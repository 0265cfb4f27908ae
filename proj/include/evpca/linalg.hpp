#pragma once

#include <Eigen/Core>
#include <vector>

#include "evpca/errors.hpp"

namespace evpca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative tolerance on sigma_1 below which singular values are
/// treated as zero when counting the numerical rank.
inline constexpr double kRankTol = 1e-12;

/// Thin SVD A = U diag(sigma) V^T truncated to the numerical rank r.
/// Sign convention: the largest-magnitude entry of each right singular
/// vector is positive (ties broken by lowest row index), so the
/// factorization is fully deterministic.
struct SpectralModel {
  Matrix U;      // n x r, column-orthonormal
  Vector sigma;  // r descending positive singular values
  Matrix V;      // p x r, column-orthonormal
  Index rank = 0;

  Matrix leading_v(Index m) const { return V.leftCols(m); }
  Matrix leading_u(Index m) const { return U.leftCols(m); }
  double leading_energy(Index m) const {
    return sigma.head(m).squaredNorm();
  }
};

SpectralModel truncated_svd(const Matrix& A);

/// Centered n x p data matrix with its truncated SVD computed up front.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  const SpectralModel& svd() const { return svd_; }
  double total_variance() const { return total_variance_; }  // ||A||_F^2

 private:
  Matrix values_;
  SpectralModel svd_;
  double total_variance_;
};

/// Y[:, perm] = Q R with R upper triangular, R(j,j) >= 0.
/// perm is the identity when pivoting is disabled.
struct QRFactors {
  Matrix Q;                 // n x m, column-orthonormal
  Matrix R;                 // m x m upper triangular, nonnegative diagonal
  std::vector<Index> perm;  // original column index chosen at each step
};

/// Y = U P with U column-orthonormal and P symmetric PSD.
struct PolarFactors {
  Matrix U;  // n x m
  Matrix P;  // m x m
};

/// Gram-Schmidt QR with optional max-residual-norm column pivoting
/// (ties go to the lowest original index). Throws RankDeficient when
/// the smallest singular value of Y is below kRankTol * largest.
QRFactors qr_decompose(const Matrix& Y, bool pivot_max_norm);

/// Polar factor via the inner SVD Y = W S G^T: U = W G^T, P = G S G^T.
/// U maximizes <Y, X>_F over column-orthonormal X.
PolarFactors polar_decompose(const Matrix& Y);

/// Orthogonal projector Z (Z^T Z)^{-1} Z^T onto span{Z}.
Matrix projector(const Matrix& Z);

/// Smallest / largest singular value ratio check used by the pre-conditions.
bool has_full_column_rank(const Matrix& Y, double tol = kRankTol);

}  // namespace evpca
