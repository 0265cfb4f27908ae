#pragma once

#include <cstdint>
#include <vector>

#include "evpca/expvar.hpp"

namespace evpca {

struct BlockPcaSolution {
  Matrix Z_star;  // p x m unit-norm loadings
  Matrix X_star;  // n x m orthonormal basis
  double objective = 0;
  int iterations = 0;
  bool converged = false;
  bool matched_svd = false;  // Z_star columnwise == V_m up to sign (1e-6)
  bool degenerate_spectrum = false;  // some sigma gap below 1e-8
};

/// Alternating maximization of the weighted optimal projected variance
/// over unit-norm loadings: given X, z_j = A^T x_j / ||A^T x_j||; given
/// Z, one weighted polar fixed-point step on X. The objective is
/// non-decreasing. With strictly decreasing weights and a distinct
/// spectrum the unique maximizer is Z = V_m up to column signs.
BlockPcaSolution solve_weighted(const DataMatrix& A, Index m,
                                const Weights& weights, double tol = 1e-12,
                                int max_iter = 1000,
                                const Matrix* init = nullptr,
                                std::uint64_t seed = 0);

/// The three first-order conditions characterizing loadings that reach
/// the PCA maximum of any projected variance: span{Z} = span{V_m},
/// Sigma^{-2}-orthogonality of the loadings in the singular basis, and
/// the normalized ellipsoid normals forming the optimal basis.
struct OptimalityCertificate {
  bool span_match = false;
  double weighted_orth_residual = 0;
  double normal_basis_residual = 0;
  bool is_pca_optimal = false;
};

OptimalityCertificate certify_pca_optimality(const DataMatrix& A,
                                             const Loadings& Z);

/// Projected gradient ascent (numerical central-difference gradients,
/// unit-sphere column renormalization, step halving from 0.1) on
/// Z -> projected_var(A, Z, rule). Accepted objective values are
/// recorded in `trace` and are non-decreasing by construction.
struct AscentResult {
  Matrix Z;
  double objective = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

AscentResult maximize_projected(const DataMatrix& A, BasisRule rule,
                                const Matrix& Z0, double tol = 1e-12,
                                int max_iter = 2000);

/// Seeded multi-start search for non-SVD maximizers of the UP projected
/// variance: converged points with all diagonal projections equal
/// (within 1e-6) that are not a signed column permutation of V_m.
/// Restarts that fail to converge are dropped; an empty result is legal.
std::vector<Matrix> find_parasitic_up(const DataMatrix& A, Index m,
                                      double tol, int restarts,
                                      std::uint64_t seed);

/// Columnwise comparison to V_m, in order (up to signs).
bool matches_svd_loadings(const DataMatrix& A, const Matrix& Z,
                          double tol = 1e-6);

/// Comparison to V_m up to a signed column permutation.
bool matches_svd_up_to_permutation(const DataMatrix& A, const Matrix& Z,
                                   double tol = 1e-5);

}  // namespace evpca
