#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evpca/expvar.hpp"

namespace evpca {

/// Seeded synthetic-data scheme: leading spectrum sigma_head followed
/// by a geometric tail sigma_{m+k} = sigma_m * tail_decay^k, with
/// Haar-distributed singular bases.
struct SimScheme {
  std::string name;  // close_eigenvalues | different_eigenvalues | custom
  Index n = 30, p = 20, m = 4;
  Vector sigma_head;
  double tail_decay = 0.5;
  std::uint64_t seed = 0;

  static SimScheme close_eigenvalues(std::uint64_t seed = 0);
  static SimScheme different_eigenvalues(std::uint64_t seed = 0);
  void validate() const;
};

/// Ascending sparsity levels in [0,1]; the first must be 0 so the grid
/// anchors at Z = V_m exactly.
struct SparsityGrid {
  std::vector<double> lambdas;

  explicit SparsityGrid(std::vector<double> ls);
  static SparsityGrid uniform(int count);  // count points over [0,1]
};

/// A = U diag(sigma) V^T with U, V drawn Haar-like (QR of seeded
/// Gaussians with positive-diagonal correction). Deterministic in
/// (scheme.seed, trial); one mt19937_64/Box-Muller stream per
/// (seed, trial, factor, column).
DataMatrix generate_matrix(const SimScheme& scheme, int trial);

/// Surrogate sparse loadings: soft-threshold each column of V_m at
/// lambda * max|entry|, renormalize; per-column threshold bisection
/// (30 steps) repairs vanishing columns or rank loss.
Loadings sparsify_loadings(const DataMatrix& A, Index m, double lambda);

}  // namespace evpca
