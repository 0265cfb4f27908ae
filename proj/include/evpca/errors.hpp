#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace evpca {

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The basis change M in Y = X M turned out singular. Should be
/// unreachable for full-rank inputs.
struct DegenerateBasis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative scheme hit its iteration cap before meeting its
/// stationarity/convergence test. Carries the last iterate.
struct NonConverged : std::runtime_error {
  NonConverged(const std::string& msg, Eigen::MatrixXd last, double value,
               int iterations)
      : std::runtime_error(msg),
        last_iterate(std::move(last)),
        value(value),
        iterations(iterations) {}

  Eigen::MatrixXd last_iterate;
  double value;
  int iterations;
};

}  // namespace evpca
