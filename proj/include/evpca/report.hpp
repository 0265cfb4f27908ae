#pragma once

#include <array>
#include <string>
#include <vector>

#include "evpca/simulate.hpp"

namespace evpca {

/// Fixed definition order used by every table and JSON payload.
inline constexpr std::array<const char*, 6> kDefinitionNames = {
    "subspVar", "optprojVar", "UPprojVar",
    "QRprojVar", "QRnormVar", "UPnormVar"};

std::array<double, 6> pev_vector(const ExpVarReport& r);

struct CurveRow {
  double lambda = 0;
  std::string definition;
  double mean_pev = 0;
  double sd_pev = 0;  // sample standard deviation
  int trials = 0;     // trials contributing to this cell
};

struct CurveTable {
  std::string scheme;
  std::uint64_t seed = 0;
  std::vector<CurveRow> rows;
  int failed_cells = 0;  // (trial, lambda) evaluations dropped

  std::string to_csv() const;
};

struct RankingReport {
  double epsilon = 0;
  bool defined = false;  // false when no pair is distinguishable
  std::array<std::array<double, 6>, 6> agreement{};  // percentages
  long n_pairs_considered = 0;
};

/// One (trial, lambda) cell: generate, sparsify, all six pev.
/// A trial failing for one definition is dropped from every
/// definition's aggregate at that lambda.
CurveTable run_pev_curves(const SimScheme& scheme, const SparsityGrid& grid,
                          int trials);

inline constexpr long kDefaultPairCap = 10'000'000;

/// Pairwise ranking agreement over epsilon-distinguishable pairs
/// (|pev_i(Y) - pev_i(Y')| >= epsilon for all six i). Exact ties count
/// as agreement only when both definitions tie.
std::vector<RankingReport> run_ranking(const SimScheme& scheme,
                                       const SparsityGrid& grid, int trials,
                                       const std::vector<double>& epsilons,
                                       long pair_cap = kDefaultPairCap);

std::string ranking_to_json(const std::vector<RankingReport>& reports,
                            const SimScheme& scheme);

/// %.12g formatting used by every emitted number.
std::string format_number(double v);

}  // namespace evpca
