#pragma once

#include <Eigen/Dense>

#include "evpca/expvar.hpp"
#include "evpca/rng.hpp"

namespace evpca::testing {

inline Matrix gaussian(Index n, Index p, std::uint64_t seed) {
  GaussianStream g(derived_seed(seed, 99, 0, 0));
  Matrix M(n, p);
  for (Index j = 0; j < p; ++j) M.col(j) = g.vector(n);
  return M;
}

inline Matrix random_orthonormal(Index n, Index m, std::uint64_t seed) {
  Matrix Q = gaussian(n, m, seed);
  Eigen::HouseholderQR<Matrix> qr(Q);
  return Matrix(qr.householderQ()).leftCols(m);
}

inline Loadings random_loadings(Index p, Index m, std::uint64_t seed) {
  return Loadings::normalized(gaussian(p, m, seed));
}

}  // namespace evpca::testing
