#include "evpca/blockpca.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "evpca/rng.hpp"

namespace evpca {

namespace {

Matrix random_unit_loadings(Index p, Index m, std::uint64_t seed,
                            std::uint64_t restart) {
  Matrix Z(p, m);
  for (Index j = 0; j < m; ++j) {
    GaussianStream g(derived_seed(seed, restart, 2, static_cast<std::uint64_t>(j)));
    Vector v = g.vector(p);
    Z.col(j) = v / v.norm();
  }
  return Z;
}

bool spectrum_degenerate(const Vector& sigma, Index m) {
  for (Index j = 0; j + 1 < m; ++j)
    if (sigma(j) - sigma(j + 1) < 1e-8) return true;
  return m < sigma.size() && sigma(m - 1) - sigma(m) < 1e-8;
}

}  // namespace

bool matches_svd_loadings(const DataMatrix& A, const Matrix& Z, double tol) {
  const Matrix Vm = A.svd().leading_v(Z.cols());
  for (Index j = 0; j < Z.cols(); ++j) {
    const double s = Z.col(j).dot(Vm.col(j)) >= 0 ? 1.0 : -1.0;
    if ((Z.col(j) - s * Vm.col(j)).norm() > tol) return false;
  }
  return true;
}

bool matches_svd_up_to_permutation(const DataMatrix& A, const Matrix& Z,
                                   double tol) {
  const Index m = Z.cols();
  const Matrix Vm = A.svd().leading_v(m);
  std::vector<bool> used(m, false);
  for (Index j = 0; j < m; ++j) {
    bool matched = false;
    for (Index i = 0; i < m && !matched; ++i) {
      if (used[i]) continue;
      const double s = Z.col(j).dot(Vm.col(i)) >= 0 ? 1.0 : -1.0;
      if ((Z.col(j) - s * Vm.col(i)).norm() <= tol) {
        used[i] = true;
        matched = true;
      }
    }
    if (!matched) return false;
  }
  return true;
}

BlockPcaSolution solve_weighted(const DataMatrix& A, Index m,
                                const Weights& weights, double tol,
                                int max_iter, const Matrix* init,
                                std::uint64_t seed) {
  if (m < 1 || m > A.svd().rank)
    throw InvalidInput("solve_weighted: need 1 <= m <= rank(A)");
  if (weights.mu.size() != m)
    throw InvalidInput("solve_weighted: weight count != m");
  if (!(tol > 0)) throw InvalidInput("solve_weighted: tol must be > 0");

  const Matrix& Am = A.values();
  const Vector mu2 = weights.mu.array().square();

  Matrix Z = init ? *init : random_unit_loadings(A.cols(), m, seed, 0);
  if (Z.rows() != A.cols() || Z.cols() != m)
    throw InvalidInput("solve_weighted: init has wrong shape");
  for (Index j = 0; j < m; ++j) Z.col(j) /= Z.col(j).norm();

  Matrix Y = Am * Z;
  Matrix X = polar_decompose(Y).U;
  auto objective = [&](const Matrix& Xc, const Matrix& Yc) {
    const Vector d = (Xc.transpose() * Yc).diagonal();
    return (mu2.array() * d.array().square()).sum();
  };
  double obj = objective(X, Y);

  BlockPcaSolution sol;
  Matrix Zprev = Z;
  for (int k = 1; k <= max_iter; ++k) {
    // inner maximizer over unit-norm loadings is closed-form
    for (Index j = 0; j < m; ++j) {
      Vector zj = Am.transpose() * X.col(j);
      const double n = zj.norm();
      if (n == 0.0)
        throw RankDeficient("solve_weighted: A^T x vanished");
      Z.col(j) = zj / n;
    }
    Y = Am * Z;
    const Vector d = (X.transpose() * Y).diagonal();
    X = polar_decompose(
            2.0 * Y * (mu2.array() * d.array()).matrix().asDiagonal())
            .U;
    const double next = objective(X, Y);
    if (next < obj - 1e-10 * (1.0 + std::abs(obj)))
      throw std::logic_error("solve_weighted: objective decreased");
    sol.iterations = k;
    // the objective plateaus before the loadings settle, so require the
    // iterate itself to be stable as well
    const bool done = next - obj < tol * (1.0 + next) &&
                      (Z - Zprev).colwise().norm().maxCoeff() < 1e-9;
    obj = next;
    Zprev = Z;
    if (done) {
      sol.converged = true;
      break;
    }
  }

  sol.Z_star = Z;
  sol.X_star = X;
  sol.objective = obj;
  sol.matched_svd = matches_svd_loadings(A, Z);
  sol.degenerate_spectrum = spectrum_degenerate(A.svd().sigma, m);

  const double bound =
      (mu2.array() * A.svd().sigma.head(m).array().square()).sum();
  if (sol.objective > bound + 1e-8 * std::max(1.0, bound))
    throw std::logic_error("solve_weighted: objective exceeds its bound");
  return sol;
}

OptimalityCertificate certify_pca_optimality(const DataMatrix& A,
                                             const Loadings& Z) {
  const Index m = Z.count();
  if (m > A.svd().rank)
    throw InvalidInput("certify_pca_optimality: m exceeds rank(A)");
  const auto& svd = A.svd();
  const Matrix Vm = svd.leading_v(m);
  const Matrix Um = svd.leading_u(m);
  const Vector sm = svd.sigma.head(m);
  const Matrix& Zm = Z.matrix();

  OptimalityCertificate cert;
  cert.span_match = (Vm * (Vm.transpose() * Zm) - Zm).norm() < 1e-8;

  // (A_m^T A_m)^{-1}-orthogonality, evaluated as sum_i zt_ij zt_ik / sigma_i^2
  const Matrix Zt = Vm.transpose() * Zm;  // coordinates in the singular basis
  double orth = 0;
  for (Index j = 0; j < m; ++j)
    for (Index k = 0; k < m; ++k) {
      if (j == k) continue;
      double s = 0;
      for (Index i = 0; i < m; ++i)
        s += Zt(i, j) * Zt(i, k) / (sm(i) * sm(i));
      orth = std::max(orth, std::abs(s));
    }
  cert.weighted_orth_residual = orth;

  // normals (A_m^{-1})^T z_j = U_m Sigma^{-1} V_m^T z_j; <y_j, n_j> >= 0
  // holds automatically, so no sign fix is needed.
  Matrix N = Um * sm.cwiseInverse().asDiagonal() * Zt;
  for (Index j = 0; j < m; ++j) {
    const double n = N.col(j).norm();
    if (n == 0.0)
      throw RankDeficient("certify_pca_optimality: zero normal");
    N.col(j) /= n;
  }
  const Matrix Y = A.values() * Zm;
  auto st = detail::optimal_basis_fixed_point(Y, Vector::Ones(m), 1e-14, 20000);
  cert.normal_basis_residual = (N - st.X).norm();

  cert.is_pca_optimal = cert.span_match &&
                        cert.weighted_orth_residual < 1e-8 &&
                        cert.normal_basis_residual < 1e-8;
  return cert;
}

namespace {

template <class F>
AscentResult ascend(F&& f, const Matrix& Z0, double tol, int max_iter) {
  AscentResult res;
  res.Z = Z0;
  for (Index j = 0; j < res.Z.cols(); ++j) res.Z.col(j) /= res.Z.col(j).norm();
  res.objective = f(res.Z);
  res.trace.push_back(res.objective);

  const double h = 1e-6;
  for (int k = 1; k <= max_iter; ++k) {
    res.iterations = k;
    // numerical gradient, projected on the tangent of each unit sphere
    Matrix G(res.Z.rows(), res.Z.cols());
    for (Index j = 0; j < res.Z.cols(); ++j)
      for (Index i = 0; i < res.Z.rows(); ++i) {
        Matrix Zp = res.Z, Zm_ = res.Z;
        Zp(i, j) += h;
        Zm_(i, j) -= h;
        G(i, j) = (f(Zp) - f(Zm_)) / (2.0 * h);
      }
    for (Index j = 0; j < res.Z.cols(); ++j)
      G.col(j) -= res.Z.col(j) * res.Z.col(j).dot(G.col(j));

    if (G.norm() < 1e-9 * (1.0 + std::abs(res.objective))) {
      res.converged = true;
      break;
    }

    double step = 0.1;
    bool accepted = false;
    while (step > 1e-14) {
      Matrix Zn = res.Z + step * G;
      for (Index j = 0; j < Zn.cols(); ++j) Zn.col(j) /= Zn.col(j).norm();
      double fn;
      try {
        fn = f(Zn);
      } catch (const RankDeficient&) {
        step *= 0.5;
        continue;
      }
      if (fn > res.objective) {
        res.Z = Zn;
        const double gain = fn - res.objective;
        res.objective = fn;
        res.trace.push_back(fn);
        accepted = true;
        if (gain < tol * (1.0 + fn)) res.converged = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || res.converged) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace

AscentResult maximize_projected(const DataMatrix& A, BasisRule rule,
                                const Matrix& Z0, double tol, int max_iter) {
  const Matrix& Am = A.values();
  return ascend(
      [&](const Matrix& Z) { return detail::projected_var_of(Am * Z, rule); },
      Z0, tol, max_iter);
}

std::vector<Matrix> find_parasitic_up(const DataMatrix& A, Index m, double tol,
                                      int restarts, std::uint64_t seed) {
  if (m < 1 || m > A.svd().rank)
    throw InvalidInput("find_parasitic_up: need 1 <= m <= rank(A)");
  const Vector& sigma = A.svd().sigma;
  for (Index j = 0; j + 1 < m; ++j)
    if (sigma(j) - sigma(j + 1) < 1e-8)
      throw InvalidInput("find_parasitic_up: spectrum not distinct");

  std::vector<Matrix> out;
  if (m < 2) return out;  // diag(X^T Y) = lambda is vacuous for m = 1

  const double target = A.svd().leading_energy(m);
  const Matrix& Am = A.values();
  auto diag_spread = [&](const Matrix& Z) {
    const Matrix Y = Am * Z;
    const Vector d = (polar_decompose(Y).U.transpose() * Y).diagonal();
    return d.maxCoeff() - d.minCoeff();
  };
  for (int rs = 0; rs < restarts; ++rs) {
    const Matrix Z0 = random_unit_loadings(A.cols(), m, seed, rs + 1);
    AscentResult asc;
    try {
      asc = maximize_projected(A, BasisRule::UP, Z0, tol, 4000);
      if (!asc.converged) continue;
      if (std::abs(asc.objective - target) > 1e-5 * target) continue;
      if (matches_svd_up_to_permutation(A, asc.Z)) continue;
      // The ridge towards the equal-diagonal point is nearly flat, so
      // finish with a penalty that is maximal exactly there; this keeps
      // the true maximizers untouched but restores quadratic curvature.
      asc = ascend(
          [&](const Matrix& Z) {
            const double s = diag_spread(Z);
            return detail::projected_var_of(Am * Z, BasisRule::UP) - s * s;
          },
          asc.Z, tol, 4000);
    } catch (const RankDeficient&) {
      continue;
    }
    if (!asc.converged) continue;
    const Matrix Y = Am * asc.Z;
    const double obj = detail::projected_var_of(Y, BasisRule::UP);
    if (std::abs(obj - target) > 1e-6 * target) continue;
    if (matches_svd_up_to_permutation(A, asc.Z)) continue;
    if (diag_spread(asc.Z) < 1e-6) out.push_back(asc.Z);
  }
  return out;
}

}  // namespace evpca
