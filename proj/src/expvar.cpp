#include "evpca/expvar.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace evpca {

namespace {

void check_pair(const DataMatrix& A, const Loadings& Z) {
  if (Z.dim() != A.cols())
    throw InvalidInput("loadings dimension does not match data columns");
  if (Z.count() > A.svd().rank)
    throw InvalidInput("more loadings than the numerical rank of A");
}

Matrix basis_for(const Matrix& Y, BasisRule rule, bool pivot_qr) {
  if (rule == BasisRule::QR) return qr_decompose(Y, pivot_qr).Q;
  return polar_decompose(Y).U;
}

double normalized_from_basis(const DataMatrix& A, const Loadings& Z,
                             const Matrix& Y, const Matrix& X) {
  const Matrix M = X.transpose() * Y;
  Eigen::PartialPivLU<Matrix> lu(M.transpose());
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() < 1e-14 * M.norm())
    throw DegenerateBasis("normalized_var: singular change of basis M");
  const Matrix T = lu.solve(Z.matrix().transpose()).transpose();  // Z = T M
  if ((A.values() * T - X).norm() > 1e-8)
    throw DegenerateBasis("normalized_var: A T does not reproduce X");
  double v = 0;
  for (Index j = 0; j < T.cols(); ++j) v += 1.0 / T.col(j).squaredNorm();
  return v;
}

}  // namespace

Loadings::Loadings(Matrix Z) : Z_(std::move(Z)) {
  if (Z_.size() == 0) throw InvalidInput("Loadings: empty matrix");
  if (!Z_.allFinite()) throw InvalidInput("Loadings: non-finite entries");
  for (Index j = 0; j < Z_.cols(); ++j) {
    if (std::abs(Z_.col(j).norm() - 1.0) > 1e-10)
      throw InvalidInput("Loadings: column " + std::to_string(j + 1) +
                         " has norm " + std::to_string(Z_.col(j).norm()) +
                         ", expected 1");
  }
  if (!has_full_column_rank(Z_))
    throw RankDeficient("Loadings: columns are linearly dependent");
}

Loadings Loadings::normalized(Matrix Z) {
  for (Index j = 0; j < Z.cols(); ++j) {
    const double n = Z.col(j).norm();
    if (n == 0.0) throw InvalidInput("Loadings: zero column");
    Z.col(j) /= n;
  }
  return Loadings(std::move(Z));
}

Weights::Weights(Vector w) : mu(std::move(w)) {
  if (mu.size() == 0) throw InvalidInput("Weights: empty");
  for (Index j = 0; j < mu.size(); ++j) {
    if (!(mu(j) > 0)) throw InvalidInput("Weights: mu_j must be positive");
    if (j > 0 && mu(j) > mu(j - 1) + 1e-15)
      throw InvalidInput("Weights: mu must be non-increasing");
  }
}

bool Weights::strictly_decreasing() const {
  for (Index j = 1; j < mu.size(); ++j)
    if (!(mu(j) < mu(j - 1))) return false;
  return true;
}

double subspace_var(const DataMatrix& A, const Loadings& Z) {
  check_pair(A, Z);
  const Matrix& Zm = Z.matrix();
  const Matrix Y = A.values() * Zm;
  const Matrix G = Zm.transpose() * Zm;
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success)
    throw RankDeficient("subspace_var: Z^T Z not positive definite");
  return llt.solve(Y.transpose() * Y).trace();
}

double normalized_var(const DataMatrix& A, const Loadings& Z, BasisRule rule,
                      bool pivot_qr) {
  check_pair(A, Z);
  const Matrix Y = A.values() * Z.matrix();
  return normalized_from_basis(A, Z, Y, basis_for(Y, rule, pivot_qr));
}

double projected_var(const DataMatrix& A, const Loadings& Z, BasisRule rule,
                     bool pivot_qr) {
  check_pair(A, Z);
  const Matrix Y = A.values() * Z.matrix();
  if (rule == BasisRule::QR)
    return qr_decompose(Y, pivot_qr).R.diagonal().squaredNorm();
  return polar_decompose(Y).P.diagonal().squaredNorm();
}

namespace detail {

double projected_var_of(const Matrix& Y, BasisRule rule) {
  if (rule == BasisRule::QR)
    return qr_decompose(Y, true).R.diagonal().squaredNorm();
  return polar_decompose(Y).P.diagonal().squaredNorm();
}

namespace {

double objective(const Matrix& Y, const Vector& mu2, const Matrix& X) {
  const Vector d = (X.transpose() * Y).diagonal();
  return (mu2.array() * d.array().square()).sum();
}

// Exact coordinate ascent over the rotation of one column pair: the
// restriction of the objective to a Givens rotation of (x_i, x_j) is a
// sinusoid in 2t with a closed-form maximizer. This untangles pairs with
// nearly equal diagonal projections, where the polar iteration contracts
// arbitrarily slowly.
void givens_sweep(const Matrix& Y, const Vector& mu2, Matrix& X) {
  const Index m = X.cols();
  const double pi = std::acos(-1.0);
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j) {
      const double a = Y.col(i).dot(X.col(i));
      const double b = Y.col(i).dot(X.col(j));
      const double p = Y.col(j).dot(X.col(i));
      const double q = Y.col(j).dot(X.col(j));
      const double al = mu2(i), be = mu2(j);
      const double C = al * a * b - be * p * q;
      const double S = 0.5 * (al * (b * b - a * a) - be * (q * q - p * p));
      if (C == 0.0 && S == 0.0) continue;
      const double t0 = 0.5 * std::atan2(-C, S);
      double best_t = 0.0, best = al * a * a + be * q * q;
      for (double t : {t0, t0 + 0.5 * pi, t0 - 0.5 * pi}) {
        const double c = std::cos(t), s = std::sin(t);
        const double va = c * a + s * b, vq = c * q - s * p;
        const double v = al * va * va + be * vq * vq;
        if (v > best) {
          best = v;
          best_t = t;
        }
      }
      if (best_t != 0.0) {
        const double c = std::cos(best_t), s = std::sin(best_t);
        const Vector xi = c * X.col(i) + s * X.col(j);
        const Vector xj = -s * X.col(i) + c * X.col(j);
        X.col(i) = xi;
        X.col(j) = xj;
      }
    }
}

bool is_stationary(const Matrix& Y, const Vector& mu2, const Matrix& X) {
  const Vector d = (X.transpose() * Y).diagonal();
  const Matrix G = Y * (mu2.array() * d.array()).matrix().asDiagonal();
  const Matrix P = X.transpose() * G;
  const double scale = Y.squaredNorm();
  const double res =
      (G - X * P).norm() + (P - P.transpose()).norm();
  if (res > 1e-8 * scale) return false;
  const Matrix Ps = 0.5 * (P + P.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(Ps, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > -1e-8 * scale;
}

}  // namespace

FixedPointState optimal_basis_fixed_point(const Matrix& Y, const Vector& mu2,
                                          double tol, int max_iter,
                                          const Matrix& X0) {
  FixedPointState st;
  st.X = X0.size() ? X0 : polar_decompose(Y).U;
  st.objective = objective(Y, mu2, st.X);
  for (int k = 1; k <= max_iter; ++k) {
    const Vector d = (st.X.transpose() * Y).diagonal();
    const Matrix G = 2.0 * Y * (mu2.array() * d.array()).matrix().asDiagonal();
    const Matrix Xn = polar_decompose(G).U;
    const double obj = objective(Y, mu2, Xn);
    if (obj < st.objective - 1e-10 * (1.0 + std::abs(st.objective)))
      throw std::logic_error("fixed point: objective decreased");
    st.iterations = k;
    st.X = Xn;
    // the polar step contracts pairwise-rotation modes arbitrarily
    // slowly when diagonal projections nearly tie; the exact pairwise
    // rotations resolve those modes at negligible cost
    givens_sweep(Y, mu2, st.X);
    const double swept = objective(Y, mu2, st.X);
    if (swept < obj - 1e-10 * (1.0 + std::abs(obj)))
      throw std::logic_error("fixed point: objective decreased");
    const bool small_gain =
        swept - st.objective < tol * (1.0 + swept);
    st.objective = std::max(obj, swept);
    if (small_gain && is_stationary(Y, mu2, st.X)) {
      st.stationary = true;
      break;
    }
  }
  if (!st.stationary) st.stationary = is_stationary(Y, mu2, st.X);
  return st;
}

}  // namespace detail

OptProjResult optimal_projected_var(const DataMatrix& A, const Loadings& Z,
                                    const std::optional<Weights>& weights,
                                    double tol, int max_iter) {
  check_pair(A, Z);
  if (!(tol > 0)) throw InvalidInput("optimal_projected_var: tol must be > 0");
  const Index m = Z.count();
  Vector mu = weights ? weights->mu : Vector::Ones(m);
  if (mu.size() != m)
    throw InvalidInput("optimal_projected_var: weight count != m");
  const Matrix Y = A.values() * Z.matrix();
  auto st = detail::optimal_basis_fixed_point(Y, mu.array().square(), tol,
                                              max_iter);
  if (!st.stationary)
    throw NonConverged("optimal_projected_var: no stationary basis within " +
                           std::to_string(max_iter) + " iterations",
                       st.X, st.objective, st.iterations);
  return {st.objective, {st.X, OrthoBasis::Rule::Optimal}, st.iterations};
}

ExpVarReport report(const DataMatrix& A, const Loadings& Z) {
  check_pair(A, Z);
  const Index m = Z.count();
  const Matrix Y = A.values() * Z.matrix();
  const QRFactors qr = qr_decompose(Y, true);
  const PolarFactors up = polar_decompose(Y);

  ExpVarReport r;
  r.subsp = subspace_var(A, Z);
  r.qr_norm = normalized_from_basis(A, Z, Y, qr.Q);
  r.up_norm = normalized_from_basis(A, Z, Y, up.U);
  r.qr_proj = qr.R.diagonal().squaredNorm();
  r.up_proj = up.P.diagonal().squaredNorm();
  r.opt_proj = optimal_projected_var(A, Z).value;
  r.total_var_y = Y.squaredNorm();
  r.pca_bound = A.svd().leading_energy(m);

  const double tv = A.total_variance();
  r.pev_subsp = r.subsp / tv;
  r.pev_qr_norm = r.qr_norm / tv;
  r.pev_up_norm = r.up_norm / tv;
  r.pev_qr_proj = r.qr_proj / tv;
  r.pev_up_proj = r.up_proj / tv;
  r.pev_opt_proj = r.opt_proj / tv;

  const double slack = 1e-8 * std::max(1.0, r.pca_bound);
  const double values[6] = {r.subsp,   r.qr_norm, r.up_norm,
                            r.qr_proj, r.up_proj, r.opt_proj};
  for (double v : values)
    if (v > r.pca_bound + slack)
      throw std::logic_error("report: value exceeds the PCA bound");
  const double proj_cap = std::min(r.subsp, r.total_var_y) + slack;
  if (r.qr_proj > proj_cap || r.up_proj > proj_cap || r.opt_proj > proj_cap)
    throw std::logic_error("report: projected value exceeds its cap");
  if (r.qr_norm > r.subsp + slack || r.up_norm > r.subsp + slack)
    throw std::logic_error("report: normalized value exceeds subspace value");
  if (r.opt_proj < std::max(r.qr_proj, r.up_proj) - slack)
    throw std::logic_error("report: optimal projected below QR/UP projected");
  return r;
}

}  // namespace evpca
