#include "evpca/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace evpca {

namespace {

void apply_sign_convention(Matrix& U, Matrix& V) {
  for (Index j = 0; j < V.cols(); ++j) {
    Index imax = 0;
    double best = -1.0;
    for (Index i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, j));
      if (a > best) {  // strict: ties keep the lowest row index
        best = a;
        imax = i;
      }
    }
    if (V(imax, j) < 0.0) {
      V.col(j) = -V.col(j);
      U.col(j) = -U.col(j);
    }
  }
}

}  // namespace

SpectralModel truncated_svd(const Matrix& A) {
  if (A.size() == 0) throw InvalidInput("truncated_svd: empty matrix");
  if (!A.allFinite()) throw InvalidInput("truncated_svd: non-finite entries");

  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Index r = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (r < s.size() && s(r) > kRankTol * s(0)) ++r;
  }

  SpectralModel model;
  model.U = svd.matrixU().leftCols(r);
  model.sigma = s.head(r);
  model.V = svd.matrixV().leftCols(r);
  model.rank = r;
  apply_sign_convention(model.U, model.V);
  return model;
}

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw InvalidInput("DataMatrix: need n >= 1 and p >= 1");
  if (!values_.allFinite())
    throw InvalidInput("DataMatrix: non-finite entries");
  svd_ = truncated_svd(values_);
  total_variance_ = values_.squaredNorm();
}

bool has_full_column_rank(const Matrix& Y, double tol) {
  Eigen::JacobiSVD<Matrix> svd(Y);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return false;
  return s(s.size() - 1) > tol * s(0);
}

QRFactors qr_decompose(const Matrix& Y, bool pivot_max_norm) {
  const Index m = Y.cols();
  if (m < 1) throw InvalidInput("qr_decompose: empty matrix");
  if (!has_full_column_rank(Y))
    throw RankDeficient("qr_decompose: Y is rank deficient");

  Matrix W = Y;  // residuals, updated in place
  Matrix Q(Y.rows(), m);
  std::vector<Index> perm;
  perm.reserve(m);
  std::vector<bool> used(m, false);

  for (Index k = 0; k < m; ++k) {
    Index pick = -1;
    if (pivot_max_norm) {
      double best = -1.0;
      for (Index j = 0; j < m; ++j) {
        if (used[j]) continue;
        const double nrm = W.col(j).norm();
        if (nrm > best) {
          best = nrm;
          pick = j;
        }
      }
    } else {
      for (Index j = 0; j < m; ++j) {
        if (!used[j]) {
          pick = j;
          break;
        }
      }
    }
    used[pick] = true;
    perm.push_back(pick);

    Vector q = W.col(pick);
    // one reorthogonalization pass
    for (int pass = 0; pass < 2; ++pass)
      for (Index l = 0; l < k; ++l) q -= Q.col(l) * Q.col(l).dot(q);
    const double nrm = q.norm();
    if (nrm <= kRankTol * Y.norm())
      throw RankDeficient("qr_decompose: Y is rank deficient");
    Q.col(k) = q / nrm;

    for (Index j = 0; j < m; ++j)
      if (!used[j]) W.col(j) -= Q.col(k) * Q.col(k).dot(W.col(j));
  }

  Matrix Yp(Y.rows(), m);
  for (Index k = 0; k < m; ++k) Yp.col(k) = Y.col(perm[k]);
  Matrix R = Q.transpose() * Yp;
  R.triangularView<Eigen::StrictlyLower>().setZero();
  // diagonal is a Gram-Schmidt column norm, hence already >= 0
  return {std::move(Q), std::move(R), std::move(perm)};
}

PolarFactors polar_decompose(const Matrix& Y) {
  if (!has_full_column_rank(Y))
    throw RankDeficient("polar_decompose: Y is rank deficient");
  Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix& W = svd.matrixU();
  const Matrix& G = svd.matrixV();
  const Vector& s = svd.singularValues();
  PolarFactors f;
  f.U = W * G.transpose();
  f.P = G * s.asDiagonal() * G.transpose();
  f.P = 0.5 * (f.P + f.P.transpose()).eval();
  return f;
}

Matrix projector(const Matrix& Z) {
  if (!has_full_column_rank(Z))
    throw RankDeficient("projector: Z is rank deficient");
  Eigen::HouseholderQR<Matrix> qr(Z);
  Matrix Q1 = qr.householderQ() * Matrix::Identity(Z.rows(), Z.cols());
  return Q1 * Q1.transpose();
}

}  // namespace evpca
