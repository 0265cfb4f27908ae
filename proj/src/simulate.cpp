#include "evpca/simulate.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "evpca/rng.hpp"

namespace evpca {

namespace {

Vector head4(double a, double b, double c, double d) {
  Vector v(4);
  v << a, b, c, d;
  return v;
}

/// Haar-like rows x cols orthonormal factor; `tag` separates the U and
/// V streams of one trial.
Matrix haar_factor(Index rows, Index cols, std::uint64_t seed,
                   std::uint64_t trial, std::uint64_t tag) {
  Matrix G(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    GaussianStream g(derived_seed(seed, trial, tag, static_cast<std::uint64_t>(j)));
    G.col(j) = g.vector(rows);
  }
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

}  // namespace

SimScheme SimScheme::close_eigenvalues(std::uint64_t seed) {
  return {"close_eigenvalues", 30, 20, 4, head4(4.0, 3.8, 3.6, 3.4), 0.5, seed};
}

SimScheme SimScheme::different_eigenvalues(std::uint64_t seed) {
  return {"different_eigenvalues", 30, 20, 4, head4(8, 4, 2, 1), 0.5, seed};
}

void SimScheme::validate() const {
  if (n < 1 || p < 1 || m < 1) throw InvalidInput("SimScheme: bad dimensions");
  if (p <= m) throw InvalidInput("SimScheme: need p > m");
  if (sigma_head.size() != m)
    throw InvalidInput("SimScheme: sigma_head must have m entries");
  for (Index j = 0; j < m; ++j) {
    if (!(sigma_head(j) > 0))
      throw InvalidInput("SimScheme: sigma_head must be positive");
    if (j > 0 && sigma_head(j) > sigma_head(j - 1))
      throw InvalidInput("SimScheme: sigma_head must be non-increasing");
  }
  if (!(tail_decay > 0.0 && tail_decay < 1.0))
    throw InvalidInput("SimScheme: tail_decay must be in (0,1)");
}

SparsityGrid::SparsityGrid(std::vector<double> ls) : lambdas(std::move(ls)) {
  if (lambdas.empty() || lambdas.front() != 0.0)
    throw InvalidInput("SparsityGrid: grid must start at lambda = 0");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] < 0.0 || lambdas[i] > 1.0)
      throw InvalidInput("SparsityGrid: lambda outside [0,1]");
    if (i > 0 && lambdas[i] <= lambdas[i - 1])
      throw InvalidInput("SparsityGrid: lambdas must be strictly increasing");
  }
}

SparsityGrid SparsityGrid::uniform(int count) {
  if (count < 2) throw InvalidInput("SparsityGrid: need at least 2 points");
  std::vector<double> ls(count);
  for (int i = 0; i < count; ++i) ls[i] = double(i) / (count - 1);
  return SparsityGrid(std::move(ls));
}

DataMatrix generate_matrix(const SimScheme& scheme, int trial) {
  scheme.validate();
  if (trial < 0) throw InvalidInput("generate_matrix: trial must be >= 0");
  const Index q = std::min(scheme.n, scheme.p);
  if (q < scheme.m) throw InvalidInput("generate_matrix: m exceeds min(n,p)");

  Vector sigma(q);
  sigma.head(scheme.m) = scheme.sigma_head;
  for (Index k = scheme.m; k < q; ++k)
    sigma(k) = scheme.sigma_head(scheme.m - 1) *
               std::pow(scheme.tail_decay, double(k - scheme.m + 1));

  const auto t = static_cast<std::uint64_t>(trial);
  const Matrix U = haar_factor(scheme.n, q, scheme.seed, t, 0);
  const Matrix V = haar_factor(scheme.p, q, scheme.seed, t, 1);
  return DataMatrix(U * sigma.asDiagonal() * V.transpose());
}

namespace {

/// Z from per-column soft thresholds; empty on a vanished column.
Matrix build_thresholded(const Matrix& Vm, const Vector& tau) {
  Matrix Z(Vm.rows(), Vm.cols());
  for (Index j = 0; j < Vm.cols(); ++j) {
    for (Index i = 0; i < Vm.rows(); ++i) {
      const double a = std::abs(Vm(i, j)) - tau(j);
      Z(i, j) = a > 0 ? (Vm(i, j) > 0 ? a : -a) : 0.0;
    }
    const double n = Z.col(j).norm();
    if (n == 0.0) return Matrix();
    Z.col(j) /= n;
  }
  return Z;
}

bool acceptable(const Matrix& Z) {
  if (Z.size() == 0) return false;
  Eigen::JacobiSVD<Matrix> svd(Z);
  const Vector& s = svd.singularValues();
  return s(s.size() - 1) > 1e-6;  // columns are unit norm
}

}  // namespace

Loadings sparsify_loadings(const DataMatrix& A, Index m, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw InvalidInput("sparsify_loadings: lambda outside [0,1]");
  if (m < 1 || m > A.svd().rank)
    throw InvalidInput("sparsify_loadings: need 1 <= m <= rank(A)");
  const Matrix Vm = A.svd().leading_v(m);
  if (lambda == 0.0) return Loadings(Vm);

  Vector nominal(m);
  for (Index j = 0; j < m; ++j)
    nominal(j) = lambda * Vm.col(j).cwiseAbs().maxCoeff();

  Vector tau = nominal;

  // repair vanished columns first: largest level keeping the column nonzero
  for (Index j = 0; j < m; ++j) {
    const double mx = Vm.col(j).cwiseAbs().maxCoeff();
    if (tau(j) < mx) continue;
    double lo = 0.0, hi = tau(j);
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mid < mx ? lo : hi) = mid;
    }
    tau(j) = lo;
  }

  Matrix Z = build_thresholded(Vm, tau);
  if (!acceptable(Z)) {
    // then rank: per-column bisection toward the largest level keeping
    // the whole Z full rank
    for (Index j = 0; j < m && !acceptable(Z); ++j) {
      double lo = 0.0, hi = tau(j);
      for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        Vector probe = tau;
        probe(j) = mid;
        if (acceptable(build_thresholded(Vm, probe)))
          lo = mid;
        else
          hi = mid;
      }
      tau(j) = lo;
      Z = build_thresholded(Vm, tau);
    }
    if (!acceptable(Z))
      throw std::logic_error("sparsify_loadings: rank repair failed");
  }
  return Loadings(std::move(Z));
}

}  // namespace evpca
