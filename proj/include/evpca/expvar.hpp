#pragma once

#include <optional>

#include "evpca/linalg.hpp"

namespace evpca {

/// Rule associating an orthonormal basis X of span{Y} to components Y.
enum class BasisRule { QR, UP };

/// p x m matrix of unit-norm, linearly independent loading vectors.
class Loadings {
 public:
  explicit Loadings(Matrix Z);

  const Matrix& matrix() const { return Z_; }
  Index count() const { return Z_.cols(); }  // m
  Index dim() const { return Z_.rows(); }    // p

  /// Columns rescaled to unit norm (for callers holding raw directions).
  static Loadings normalized(Matrix Z);

 private:
  Matrix Z_;
};

/// Strictly positive, non-increasing per-component weights mu_j.
struct Weights {
  Vector mu;

  explicit Weights(Vector w);
  static Weights ones(Index m) { return Weights(Vector::Ones(m)); }
  bool strictly_decreasing() const;
};

/// Orthonormal basis of span{Y} tagged with the rule that produced it.
struct OrthoBasis {
  enum class Rule { QR, UP, Optimal };
  Matrix X;
  Rule rule;
};

/// The six explained-variance values plus pev for one (A, Z) pair.
struct ExpVarReport {
  double subsp = 0, qr_norm = 0, up_norm = 0;
  double qr_proj = 0, up_proj = 0, opt_proj = 0;
  double pev_subsp = 0, pev_qr_norm = 0, pev_up_norm = 0;
  double pev_qr_proj = 0, pev_up_proj = 0, pev_opt_proj = 0;
  double total_var_y = 0;  // ||Y||_F^2
  double pca_bound = 0;    // sigma_1^2 + ... + sigma_m^2
};

/// tr{Y^T Y (Z^T Z)^{-1}}; depends only on span{Z}.
double subspace_var(const DataMatrix& A, const Loadings& Z);

/// Sum_j 1/||t_j||^2 with Z = T M, Y = X M and X chosen by `rule`.
/// QR uses max-norm pivoting when pivot_qr is set (the default).
double normalized_var(const DataMatrix& A, const Loadings& Z, BasisRule rule,
                      bool pivot_qr = true);

/// Sum_j <y_j, x_j>^2; equals sum r_jj^2 (QR) or sum p_jj^2 (UP).
double projected_var(const DataMatrix& A, const Loadings& Z, BasisRule rule,
                     bool pivot_qr = true);

struct OptProjResult {
  double value = 0;
  OrthoBasis basis;
  int iterations = 0;
};

/// Fixed-point maximization X_{k+1} = polar(2 Y diag(mu^2) diag(X_k^T Y))
/// from X_0 = polar(Y). The objective is non-decreasing across
/// iterations; the returned X satisfies the first-order condition
/// Y diag(mu^2) diag(X^T Y) = X P with P symmetric PSD (relative
/// residual below 1e-8), else NonConverged is thrown with the last
/// iterate.
OptProjResult optimal_projected_var(const DataMatrix& A, const Loadings& Z,
                                    const std::optional<Weights>& weights = {},
                                    double tol = 1e-12, int max_iter = 1000);

/// All six definitions plus pev in one pass, sharing decompositions.
ExpVarReport report(const DataMatrix& A, const Loadings& Z);

namespace detail {
/// Core of the weighted fixed point operating on Y directly; shared
/// with the block-PCA solvers. X0 empty means start from polar(Y).
struct FixedPointState {
  Matrix X;
  double objective = 0;
  int iterations = 0;
  bool stationary = false;
};
FixedPointState optimal_basis_fixed_point(const Matrix& Y, const Vector& mu2,
                                          double tol, int max_iter,
                                          const Matrix& X0 = Matrix());
double projected_var_of(const Matrix& Y, BasisRule rule);
}  // namespace detail

}  // namespace evpca
