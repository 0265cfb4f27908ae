// Acceptance suite: one pass/fail line per criterion, nonzero exit on
// any failure. Runtime target: well under five minutes.

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <vector>

#include "evpca/blockpca.hpp"
#include "evpca/config.hpp"
#include "evpca/report.hpp"
#include "evpca/rng.hpp"

using namespace evpca;

namespace {

int g_failures = 0;
bool g_monotone_ok = true;  // updated by every iterative run we observe

void check(int id, const char* name, bool ok) {
  std::printf("%s  %02d %s\n", ok ? "PASS" : "FAIL", id, name);
  if (!ok) ++g_failures;
}

Matrix gaussian(Index n, Index p, std::uint64_t seed) {
  GaussianStream g(derived_seed(seed, 98, 0, 0));
  Matrix M(n, p);
  for (Index j = 0; j < p; ++j) M.col(j) = g.vector(n);
  return M;
}

Loadings random_loadings(Index p, Index m, std::uint64_t seed) {
  return Loadings::normalized(gaussian(p, m, seed));
}

void observe_trace(const std::vector<double>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k)
    if (trace[k] < trace[k - 1]) g_monotone_ok = false;
}

// ---- 1: exactness of every definition at the SVD loadings ----
bool criterion_exactness() {
  const SimScheme scheme = SimScheme::close_eigenvalues(101);
  for (int t = 0; t < 100; ++t) {
    const DataMatrix A = generate_matrix(scheme, t);
    for (Index m = 1; m <= 4; ++m) {
      const double target = A.svd().leading_energy(m);
      const ExpVarReport r = report(A, Loadings{A.svd().leading_v(m)});
      for (double v : {r.subsp, r.qr_norm, r.up_norm, r.qr_proj, r.up_proj,
                       r.opt_proj})
        if (std::abs(v - target) > 1e-8 * target) return false;
    }
  }
  return true;
}

// ---- 2: ordering chain on sampled pairs ----
bool criterion_ordering() {
  int count = 0;
  for (int s = 0; count < 10000; ++s) {
    const DataMatrix A(gaussian(8, 6, 5000 + s));
    for (Index m = 1; m <= 3 && count < 10000; ++m, ++count) {
      ExpVarReport r;
      try {
        r = report(A, random_loadings(6, m, 90000 + 10 * s + m));
      } catch (const NonConverged&) {
        return false;
      }
      const double slack = 1e-8 * std::max(1.0, r.pca_bound);
      if (r.qr_norm > r.subsp + slack) return false;
      if (r.up_norm > r.subsp + slack) return false;
      if (r.qr_proj > r.subsp + slack) return false;
      if (r.up_proj > r.subsp + slack) return false;
      if (r.opt_proj > r.subsp + slack) return false;
      if (r.opt_proj < r.qr_proj - slack) return false;
      if (r.opt_proj < r.up_proj - slack) return false;
    }
  }
  return true;
}

// ---- 3: total-variance dichotomy and its three witnesses ----
bool criterion_total_variance() {
  // projected values never exceed ||Y||_F^2; equality marks orthogonal Y
  for (int s = 0; s < 500; ++s) {
    const DataMatrix A(gaussian(7, 5, 6000 + s));
    const Loadings Z = random_loadings(5, 2, 95000 + s);
    const Matrix Y = A.values() * Z.matrix();
    const double total = Y.squaredNorm();
    const double offdiag = std::abs(Y.col(0).dot(Y.col(1)));
    const double slack = 1e-8 * std::max(1.0, total);
    for (BasisRule rule : {BasisRule::QR, BasisRule::UP}) {
      const double v = projected_var(A, Z, rule);
      if (v > total + slack) return false;
      if (v >= total - slack && offdiag > 1e-6) return false;
    }
  }
  // orthogonal components reach equality
  {
    Matrix Yo = gaussian(6, 2, 6601);
    Eigen::HouseholderQR<Matrix> qr(Yo);
    Matrix Q = Matrix(qr.householderQ()).leftCols(2);
    Q.col(0) *= 2.0;
    const DataMatrix A(gaussian(6, 6, 6602));
    Matrix Z = A.values().colPivHouseholderQr().solve(Q);
    for (int j = 0; j < 2; ++j) Z.col(j) /= Z.col(j).norm();
    const Loadings L{Z};
    const Matrix Y = A.values() * Z;
    const double total = Y.squaredNorm();
    for (BasisRule rule : {BasisRule::QR, BasisRule::UP})
      if (std::abs(projected_var(A, L, rule) - total) > 1e-8 * total)
        return false;
  }
  // witnesses: both normalized variances above the cap, and the
  // subspace variance above the cap for orthogonal components
  Matrix A2(2, 2);
  A2 << 3, 0, 0, 2;
  const DataMatrix D(A2);
  const double pi = std::acos(-1.0);
  auto angles = [](double a1, double a2) {
    Matrix Z(2, 2);
    Z << std::cos(a1), std::cos(a2), std::sin(a1), std::sin(a2);
    return Loadings(Z);
  };
  const Loadings W = angles(pi / 2 - 0.1, pi / 2 + 0.1);
  const double total = (D.values() * W.matrix()).squaredNorm();
  if (normalized_var(D, W, BasisRule::QR) <= total) return false;
  if (normalized_var(D, W, BasisRule::UP) <= total) return false;
  const double a1 = 0.7;
  const Loadings O =
      angles(a1, std::atan2(-9.0 * std::cos(a1), 4.0 * std::sin(a1)));
  const Matrix Yo = D.values() * O.matrix();
  if (std::abs(Yo.col(0).dot(Yo.col(1))) > 1e-10) return false;
  return subspace_var(D, O) > Yo.squaredNorm() + 1e-6;
}

// ---- 4: overcount example stays below the spectral bound ----
bool criterion_overcount() {
  Matrix A3 = Matrix::Zero(3, 3);
  A3.diagonal() << 3, 2, 1;
  const DataMatrix A(A3);
  Matrix Z(3, 2);
  Z << std::cos(0.1), std::cos(0.1), std::sin(0.1), -std::sin(0.1), 0, 0;
  const Loadings L{Z};
  const double total = (A.values() * Z).squaredNorm();
  if (!(total > 17.5 && total <= 18.0)) return false;
  if (std::abs(A.total_variance() - 14.0) > 1e-12) return false;
  const ExpVarReport r = report(A, L);
  for (double v : {r.subsp, r.qr_norm, r.up_norm, r.qr_proj, r.up_proj,
                   r.opt_proj})
    if (v > 13.0 + 1e-8) return false;
  return true;
}

// ---- 5: fixed point vs brute-force rotation family (m = 2) ----
bool criterion_optimal_oracle() {
  const double pi = std::acos(-1.0);
  for (int s = 0; s < 100; ++s) {
    const DataMatrix A(gaussian(6, 4, 7000 + s));
    const Loadings Z = random_loadings(4, 2, 97000 + s);
    const Matrix Y = A.values() * Z.matrix();
    const Matrix Q = qr_decompose(Y, false).Q;
    auto value = [&](double t, double refl) {
      Matrix X(Y.rows(), 2);
      X.col(0) = std::cos(t) * Q.col(0) + std::sin(t) * Q.col(1);
      X.col(1) = refl * (-std::sin(t) * Q.col(0) + std::cos(t) * Q.col(1));
      return (X.transpose() * Y).diagonal().squaredNorm();
    };
    double best = 0, best_t = 0, best_r = 1;
    for (int k = 0; k < 100000; ++k) {
      const double t = 2.0 * pi * k / 100000;
      for (double refl : {1.0, -1.0}) {
        const double v = value(t, refl);
        if (v > best) best = v, best_t = t, best_r = refl;
      }
    }
    double lo = best_t - 2.0 * pi / 100000, hi = best_t + 2.0 * pi / 100000;
    for (int it = 0; it < 80; ++it) {  // golden-section refinement
      const double t1 = lo + 0.382 * (hi - lo), t2 = lo + 0.618 * (hi - lo);
      if (value(t1, best_r) < value(t2, best_r))
        lo = t1;
      else
        hi = t2;
    }
    best = std::max(best, value(0.5 * (lo + hi), best_r));
    const double fp = optimal_projected_var(A, Z).value;
    if (std::abs(fp - best) > 1e-6 * best) return false;
  }
  return true;
}

// ---- 6: weighted solver uniqueness and weight independence ----
bool criterion_weighted_uniqueness() {
  const SimScheme scheme = SimScheme::different_eigenvalues(201);
  const Index m = 3;
  Vector mu(m);
  for (Index j = 0; j < m; ++j) mu(j) = double(m - j);
  for (int t = 0; t < 100; ++t) {
    const DataMatrix A = generate_matrix(scheme, t);
    const double target =
        (mu.array().square() * A.svd().sigma.head(m).array().square()).sum();
    for (int init = 0; init < 5; ++init) {
      const BlockPcaSolution sol = solve_weighted(
          A, m, Weights{mu}, 1e-14, 2000, nullptr, 1000 + 7 * t + init);
      if (!sol.converged || !sol.matched_svd) return false;
      if (std::abs(sol.objective - target) > 1e-8 * std::max(1.0, target))
        return false;
    }
  }
  // the maximizer does not depend on which decreasing weights are used
  const DataMatrix A = generate_matrix(scheme, 0);
  Matrix ref;
  for (auto [a, b] : {std::pair{2.0, 1.0}, {10.0, 1.0}, {1.1, 1.0}}) {
    Vector w(2);
    w << a, b;
    const BlockPcaSolution sol = solve_weighted(A, 2, Weights{w}, 1e-14, 2000);
    if (!sol.converged || !sol.matched_svd) return false;
    if (ref.size() == 0) {
      ref = sol.Z_star;
    } else {
      for (int j = 0; j < 2; ++j) {
        const double s = ref.col(j).dot(sol.Z_star.col(j)) >= 0 ? 1.0 : -1.0;
        if ((ref.col(j) - s * sol.Z_star.col(j)).norm() > 1e-6) return false;
      }
    }
  }
  return true;
}

// ---- 7: QR-projected maximization only reaches permuted SVD loadings ----
bool criterion_qr_uniqueness() {
  const SpectralModel s = truncated_svd(gaussian(6, 4, 301));
  Vector sv(4);
  sv << 4, 3, 2, 1;
  const DataMatrix A(s.U * sv.asDiagonal() * s.V.transpose());
  for (int rs = 0; rs < 50; ++rs) {
    const Matrix Z0 = random_loadings(4, 2, 99000 + rs).matrix();
    const AscentResult res =
        maximize_projected(A, BasisRule::QR, Z0, 1e-14, 4000);
    observe_trace(res.trace);
    if (!res.converged) return false;
    if (!matches_svd_up_to_permutation(A, res.Z, 1e-5)) return false;
  }
  return true;
}

// ---- 8: parasitic maximizer of the UP projected variance ----
bool criterion_parasitic() {
  Matrix A2(2, 2);
  A2 << 3, 0, 0, 2;
  const DataMatrix A(A2);
  const auto hits = find_parasitic_up(A, 2, 1e-13, 64, 1);
  if (hits.empty()) return false;
  for (const Matrix& Z : hits) {
    const Matrix Y = A.values() * Z;
    const Vector d = (polar_decompose(Y).U.transpose() * Y).diagonal();
    if (std::abs(d(0) - d(1)) > 1e-6) return false;
    if (std::abs(detail::projected_var_of(Y, BasisRule::UP) - 13.0) >
        1e-6 * 13.0)
      return false;
    if (matches_svd_up_to_permutation(A, Z)) return false;
  }
  return true;
}

// ---- 9: monotone objectives in every iterative run above ----
bool criterion_monotone() {
  // the fixed point and the alternating solver hard-assert monotonicity
  // internally (criteria 1-8 would have aborted); ascent traces were
  // checked as they were produced
  for (int s = 0; s < 20; ++s) {
    const DataMatrix A(gaussian(6, 4, 8000 + s));
    for (BasisRule rule : {BasisRule::QR, BasisRule::UP}) {
      const AscentResult res = maximize_projected(
          A, rule, random_loadings(4, 2, 98000 + s).matrix());
      observe_trace(res.trace);
    }
  }
  return g_monotone_ok;
}

// ---- 10: ranking agreement within the projected/QR-normalized family ----
bool criterion_ranking() {
  const SimScheme scheme = SimScheme::different_eigenvalues(401);
  const auto reports =
      run_ranking(scheme, SparsityGrid::uniform(50), 20, {1e-2});
  if (reports.size() != 1 || !reports[0].defined) return false;
  // family {optprojVar, UPprojVar, QRprojVar, QRnormVar} = indices 1..4
  for (int i = 1; i <= 4; ++i)
    for (int j = i + 1; j <= 4; ++j)
      if (reports[0].agreement[i][j] < 95.0) return false;
  return true;
}

// ---- 11: ascent direction against central differences ----
bool criterion_gradient() {
  GaussianStream g(derived_seed(501, 0, 0, 0));
  const Matrix Y = gaussian(6, 3, 502);
  Vector mu2(3);
  mu2 << 4, 2.25, 1;
  auto f = [&](const Matrix& X) {
    const Vector d = (X.transpose() * Y).diagonal();
    return (mu2.array() * d.array().square()).sum();
  };
  for (int s = 0; s < 100; ++s) {
    Matrix X(6, 3);
    for (int j = 0; j < 3; ++j) X.col(j) = g.vector(6);
    const Vector d = (X.transpose() * Y).diagonal();
    const Matrix G = 2.0 * Y * (mu2.array() * d.array()).matrix().asDiagonal();
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 6; ++i) {
        Matrix Xp = X, Xm = X;
        Xp(i, j) += 1e-6;
        Xm(i, j) -= 1e-6;
        const double fd = (f(Xp) - f(Xm)) / 2e-6;
        if (std::abs(G(i, j) - fd) > 1e-5 * std::max(1.0, std::abs(fd)))
          return false;
      }
  }
  return true;
}

// ---- 12: byte-identical experiment outputs for identical seeds ----
bool criterion_determinism() {
  const SimScheme scheme = SimScheme::close_eigenvalues(601);
  const SparsityGrid grid({0.0, 0.3, 0.7});
  const std::string c1 = run_pev_curves(scheme, grid, 8).to_csv();
  const std::string c2 = run_pev_curves(scheme, grid, 8).to_csv();
  if (c1 != c2) return false;
  const std::string r1 =
      ranking_to_json(run_ranking(scheme, grid, 8, {0.0, 1e-2}), scheme);
  const std::string r2 =
      ranking_to_json(run_ranking(scheme, grid, 8, {0.0, 1e-2}), scheme);
  return r1 == r2;
}

}  // namespace

int main() {
  try {
    check(1, "every definition is exact at the SVD loadings", criterion_exactness());
    check(2, "subspace dominates; optimal dominates projected", criterion_ordering());
    check(3, "total-variance cap dichotomy and witnesses", criterion_total_variance());
    check(4, "correlated components overcount stays below the bound", criterion_overcount());
    check(5, "fixed point matches the brute-force rotation oracle", criterion_optimal_oracle());
    check(6, "weighted solver: unique SVD maximizer, weight-independent", criterion_weighted_uniqueness());
    check(7, "QR-projected ascent only reaches permuted SVD loadings", criterion_qr_uniqueness());
    check(8, "parasitic UP maximizer found on diag(3,2)", criterion_parasitic());
    check(9, "iterative objectives are monotone", criterion_monotone());
    check(10, "ranking agreement >= 95% in the projected family", criterion_ranking());
    check(11, "ascent direction matches finite differences", criterion_gradient());
    check(12, "experiments are byte-identical under reruns", criterion_determinism());
  } catch (const std::exception& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return 1;
  }
  return g_failures == 0 ? 0 : 1;
}
